import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from paritylab.oracle import NoiseModel, OracleMode
from paritylab.readout import CalibrationSet, ReadoutParams
from paritylab.solvers import QueryBatch
from paritylab.harness.campaign import generate_pool

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def exact_calibration(n):
    """Noise-free readout: voltages equal the bits."""
    return CalibrationSet(tuple(ReadoutParams(0.0, 1.0, 0.0, 0.0) for _ in range(n + 1)), 0)


def bits_batch(a, d):
    """A batch whose voltages are exactly the given bits."""
    d = np.atleast_2d(np.asarray(d, dtype=float))
    return QueryBatch(np.asarray(a, dtype=float), d, exact_calibration(d.shape[1]))


def pool_for(key, mode, *, eta_a=0.0, eta_d=0.0, depol=0.0, size=2000, seed=0):
    noise = NoiseModel.uniform(key.n, eta_a=eta_a, eta_d=eta_d, two_qubit_depol=depol)
    return generate_pool(key, mode, noise, size, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


CLASSICAL, QUANTUM = OracleMode.CLASSICAL, OracleMode.QUANTUM


# one PASS/FAIL line per acceptance criterion, printed after the test run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
