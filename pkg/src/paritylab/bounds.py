"""Sufficient query counts for the analog quantum solvers.

Both bounds guarantee that soft-averaged data voltages land on the correct
side of the threshold for all ``n`` bits with probability at least
``1 - delta``, for typical postselection statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundParams:
    n: int
    eta_a: float
    eta_d: float
    sigma: float
    delta: float
    delta_prime: float = 0.05
    delta_dprime: float = 0.05

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.eta_a <= 1.0:
            raise ValueError("eta_a must be a probability")
        if not 0.0 <= self.eta_d <= 0.5:
            raise ValueError("eta_d must be in [0, 0.5]")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if not 0.0 <= self.delta_prime <= 1.0 / 3.0:
            raise ValueError("delta_prime must be in [0, 1/3]")
        if not 0.0 <= self.delta_dprime <= 1.0:
            raise ValueError("delta_dprime must be in [0, 1]")

    @property
    def eta_bar_a(self) -> float:
        return max(self.eta_a, 1.0 - self.eta_a)


def _log_term(p: BoundParams) -> float:
    return math.log(p.n / (2.0 * p.delta))


def postselected_bound(p: BoundParams) -> float:
    """Queries sufficient for postselected soft averaging.

    ``4 s^2 ln(n / 2 delta) / [(1 - d'')^2 (1 - 3 d')^2 (1/2 - eta_d)^2 eta_bar_a^2]``

    Returns ``inf`` where the denominator vanishes (``eta_d = 1/2`` or a
    slack at its cap).
    """
    denom = ((1 - p.delta_dprime) ** 2 * (1 - 3 * p.delta_prime) ** 2
             * (0.5 - p.eta_d) ** 2 * p.eta_bar_a**2)
    if denom == 0:
        return math.inf
    return 4 * p.sigma**2 / denom * _log_term(p)


def no_postselect_bound(p: BoundParams) -> float:
    """Queries sufficient when the ancilla is ignored (``eta_a`` unused)."""
    denom = (1 - 3 * p.delta_prime) ** 2 * (0.5 - p.eta_d) ** 2
    if denom == 0:
        return math.inf
    return 8 * p.sigma**2 / denom * _log_term(p)


def typicality_probability(eta_bar_a: float, n_prime: int, delta_prime: float) -> tuple[float, bool]:
    """Chernoff lower bound ``1 - 2 exp(-d'^2 eta_bar_a N' / 3)``, clamped to [0, 1].

    Returns ``(probability, clamped)``.
    """
    if n_prime < 1:
        raise ValueError("n_prime must be >= 1")
    raw = 1.0 - 2.0 * math.exp(-(delta_prime**2) * eta_bar_a * n_prime / 3.0)
    clamped = min(max(raw, 0.0), 1.0)
    return clamped, clamped != raw
