"""Simulation and benchmark harness for learning parity with noise on a
noisy quantum parity oracle."""

__version__ = "0.1.0"
