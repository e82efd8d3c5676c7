"""Homodyne-voltage readout model, calibration and digitization thresholds.

Voltages are in rescaled units: a qubit in ``|0>`` (``|1>``) reads a
Gaussian centred on ``mu0`` (``mu1``), nominally 0 (1).  An assignment
error ``eta`` is realized as a common standard deviation such that the
midpoint threshold misassigns a fraction ``eta`` of shots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .oracle import NoiseModel

# eta -> 0.5 sends sigma to infinity; above this cap (sigma ~ 10) the voltage
# model is pinned so that 10^4 calibration shots still resolve mu1 > mu0
ETA_CAP = 0.48
_EQUAL_VAR_TOL = 1e-9


class CalibrationError(ValueError):
    """Calibration shots could not resolve the two readout levels."""


class DegenerateThresholdError(ValueError):
    """The two distributions to discriminate have the same mean."""


@dataclass(frozen=True)
class ReadoutParams:
    mu0: float = 0.0
    mu1: float = 1.0
    sigma0: float = 0.0
    sigma1: float = 0.0

    def __post_init__(self):
        if not self.mu1 > self.mu0:
            raise ValueError(f"need mu1 > mu0, got {self.mu0}, {self.mu1}")
        # sigma == 0 is the noise-free limit
        if self.sigma0 < 0 or self.sigma1 < 0:
            raise ValueError("standard deviations must be non-negative")

    def mean(self, bit: int) -> float:
        return self.mu1 if bit else self.mu0

    def std(self, bit: int) -> float:
        return self.sigma1 if bit else self.sigma0

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.mu0 + self.mu1)

    @property
    def pooled_sigma(self) -> float:
        return math.sqrt(0.5 * (self.sigma0**2 + self.sigma1**2))

    def rescaled(self) -> "ReadoutParams":
        """The same distributions after mapping mu0 -> 0 and mu1 -> 1."""
        span = self.mu1 - self.mu0
        return ReadoutParams(0.0, 1.0, self.sigma0 / span, self.sigma1 / span)


@dataclass(frozen=True)
class QueryRecord:
    v_a: float
    v_d: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "v_d", tuple(float(v) for v in self.v_d))
        if not all(math.isfinite(v) for v in (self.v_a, *self.v_d)):
            raise ValueError("voltages must be finite")

    @property
    def n(self) -> int:
        return len(self.v_d)


@dataclass(frozen=True)
class CalibrationSet:
    """Per-qubit readout estimates; index 0 is the ancilla, ``i`` is ``D_i``."""

    params: tuple[ReadoutParams, ...]
    shots_per_point: int

    @property
    def n(self) -> int:
        return len(self.params) - 1

    @property
    def ancilla(self) -> ReadoutParams:
        return self.params[0]

    @property
    def data(self) -> tuple[ReadoutParams, ...]:
        return self.params[1:]

    @classmethod
    def ideal(cls, noise: NoiseModel) -> "CalibrationSet":
        """Calibration equal to the true readout parameters (no estimation noise)."""
        etas = (noise.eta_a, *noise.eta_d)
        return cls(tuple(params_for_eta(e) for e in etas), shots_per_point=0)


def sigma_from_eta(eta: float) -> float:
    """Common sigma giving assignment error ``eta`` at the midpoint threshold."""
    if not 0.0 < eta < 0.5:
        raise ValueError(f"eta must be in (0, 0.5), got {eta}")
    return 0.5 / norm.ppf(1.0 - eta)


def eta_from_sigma(sigma: float) -> float:
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return 0.0
    return float(norm.sf(0.5 / sigma))


def params_for_eta(eta: float) -> ReadoutParams:
    if eta == 0:
        return ReadoutParams(0.0, 1.0, 0.0, 0.0)
    s = sigma_from_eta(min(eta, ETA_CAP))
    return ReadoutParams(0.0, 1.0, s, s)


def sample_voltage(bit: int, params: ReadoutParams, rng: np.random.Generator) -> float:
    return float(rng.normal(params.mean(bit), params.std(bit)))


def sample_voltages(bits: np.ndarray, params: ReadoutParams, rng: np.random.Generator) -> np.ndarray:
    bits = np.asarray(bits)
    mean = np.where(bits == 1, params.mu1, params.mu0)
    std = np.where(bits == 1, params.sigma1, params.sigma0)
    return mean + std * rng.standard_normal(bits.shape)


def sample_record_voltages(a: np.ndarray, d: np.ndarray, noise: NoiseModel,
                           rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Voltages for measured bits ``a`` (shots,) and ``d`` (shots, n)."""
    v_a = sample_voltages(a, params_for_eta(noise.eta_a), rng)
    v_d = np.column_stack([
        sample_voltages(d[:, i], params_for_eta(eta), rng)
        for i, eta in enumerate(noise.eta_d)
    ])
    return v_a, v_d


def generate_calibration(noise: NoiseModel, shots: int = 10_000,
                         rng: np.random.Generator | None = None) -> CalibrationSet:
    """Estimate per-qubit readout parameters from n + 2 calibration points.

    The points are the collective ground state and one single-qubit
    excitation per qubit.  A qubit's ``|0>`` statistics come from the ground
    state, its ``|1>`` statistics from the point that excites it.
    """
    if shots < 100:
        raise ValueError("calibration needs at least 100 shots per point")
    if rng is None:
        rng = np.random.default_rng()
    nq = noise.n + 1
    truth = [params_for_eta(e) for e in (noise.eta_a, *noise.eta_d)]
    points = [np.zeros(nq, dtype=np.int8)]
    for q in range(nq):
        excited = np.zeros(nq, dtype=np.int8)
        excited[q] = 1
        points.append(excited)
    readings = [
        np.column_stack([sample_voltages(np.full(shots, state[q]), truth[q], rng) for q in range(nq)])
        for state in points
    ]
    params = []
    for q in range(nq):
        v0 = readings[0][:, q]
        v1 = readings[q + 1][:, q]
        if not v1.mean() > v0.mean():
            raise CalibrationError(f"qubit {q}: excited-state mean not above ground-state mean")
        params.append(ReadoutParams(float(v0.mean()), float(v1.mean()),
                                    float(v0.std(ddof=1)), float(v1.std(ddof=1))))
    return CalibrationSet(tuple(params), shots)


def digitize(v, threshold):
    """1 where ``v > threshold``; a tie reads 0."""
    out = np.asarray(v) > threshold
    return int(out) if out.ndim == 0 else out.astype(np.int8)


def mixture_moments(params: ReadoutParams, eta_a: float) -> tuple[float, float]:
    """Mean and variance of ``eta_a * P0 + (1 - eta_a) * P1``."""
    if not 0.0 <= eta_a <= 1.0:
        raise ValueError(f"eta_a must be in [0, 1], got {eta_a}")
    w0, w1 = eta_a, 1.0 - eta_a
    mean = w1 * params.mu1 + w0 * params.mu0
    var = (w1 * params.sigma1**2 + w0 * params.sigma0**2
           + w0 * w1 * (params.mu1 - params.mu0) ** 2)
    return mean, var


def _equal_z_point(m0, s0, m1, s1):
    if s0 + s1 == 0:
        return 0.5 * (m0 + m1)
    return (m0 * s1 + m1 * s0) / (s0 + s1)


def calibrated_threshold(params: ReadoutParams, eta_a: float, n_avg: int | None = None) -> float:
    """Threshold separating averaged data voltages for key bit 0 from key bit 1.

    Bit 0 averages are modelled by ``P0``; bit 1 averages by a Gaussian with
    the moments of the ``eta_a``-weighted mixture.  The threshold is the
    equal-likelihood crossing of the two Gaussians for the mean of ``n_avg``
    samples, taking the root between the two means.

    With ``n_avg=None`` the large-sample limit is returned: the point at
    equal standardized distance from both means.  It does not depend on the
    number of averaged queries.  Equal variances give the midpoint in both
    cases.
    """
    if not 0.0 <= eta_a <= 0.5:
        raise ValueError(f"eta_a must be in [0, 0.5], got {eta_a}")
    m0, v0 = params.mu0, params.sigma0**2
    m1, v1 = mixture_moments(params, eta_a)
    if math.isclose(m0, m1, rel_tol=0.0, abs_tol=1e-12):
        raise DegenerateThresholdError("bit-0 and bit-1 distributions share a mean")
    if abs(v0 - v1) <= _EQUAL_VAR_TOL:
        return 0.5 * (m0 + m1)
    s0, s1 = math.sqrt(v0), math.sqrt(v1)
    if n_avg is None or v0 == 0 or v1 == 0:
        return _equal_z_point(m0, s0, m1, s1)
    if n_avg < 1:
        raise ValueError("n_avg must be >= 1")
    # N * [(x - m1)^2 / v1 - (x - m0)^2 / v0] = ln(v0 / v1)
    a = 1.0 / v1 - 1.0 / v0
    b = 2.0 * (m0 / v0 - m1 / v1)
    c = m1**2 / v1 - m0**2 / v0 - math.log(v0 / v1) / n_avg
    disc = b * b - 4 * a * c
    lo, hi = min(m0, m1), max(m0, m1)
    if disc >= 0:
        sq = math.sqrt(disc)
        for root in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)):
            if lo < root < hi:
                return root
    # the narrower density dominates at both means: no crossing in between
    return _equal_z_point(m0, s0, m1, s1)
