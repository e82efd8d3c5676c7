"""Error-probability curves from resampled query pools.

The pipeline: resample a fixed pool at each subset size N, count wrong keys,
put a Jeffreys credible interval on each failure rate, force the interval
bounds to be non-increasing in N with antitonic regression, then read off
the N at which the bounds cross the target error, and average those
intervals over keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import beta

from .oracle import Key
from .solvers import KeyEstimate, QueryBatch, SOLVERS, decide, record_features


def default_credible_level(n: int) -> float:
    """Per-key level whose union bound over all 2**n keys gives 95%."""
    return 1.0 - 0.05 / 2**n


def jeffreys_interval(failures: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Equal-tailed interval of Beta(failures + 1/2, trials - failures + 1/2).

    At the boundaries the interval is pinned: ``lo = 0`` when no failures
    were seen, ``hi = 1`` when every trial failed.
    """
    if not 0 <= failures <= trials:
        raise ValueError(f"need 0 <= failures <= trials, got {failures}/{trials}")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    if trials == 0:
        return 0.0, 1.0
    tail = 0.5 * (1.0 - level)
    a, b = failures + 0.5, trials - failures + 0.5
    lo = 0.0 if failures == 0 else float(beta.ppf(tail, a, b))
    hi = 1.0 if failures == trials else float(beta.isf(tail, a, b))
    return lo, hi


def antitonic_pava(values: Sequence[float], weights: Sequence[float] | None = None) -> np.ndarray:
    """Weighted least-squares non-increasing fit (pool adjacent violators)."""
    y = np.asarray(values, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if y.shape != w.shape:
        raise ValueError("values and weights must have equal length")
    if (w <= 0).any():
        raise ValueError("weights must be positive")
    # blocks as (mean, weight, length); merge while a later block exceeds an earlier one
    means, wts, lens = [], [], []
    for yi, wi in zip(y, w):
        means.append(yi)
        wts.append(wi)
        lens.append(1)
        while len(means) > 1 and means[-2] < means[-1]:
            m2, w2, l2 = means.pop(), wts.pop(), lens.pop()
            m1, w1, l1 = means.pop(), wts.pop(), lens.pop()
            wt = w1 + w2
            means.append((m1 * w1 + m2 * w2) / wt)
            wts.append(wt)
            lens.append(l1 + l2)
    return np.repeat(means, lens)


@dataclass(frozen=True)
class CurvePoint:
    N: int
    failures: int
    trials: int
    lo: float
    hi: float
    lo_mono: float = math.nan
    hi_mono: float = math.nan
    p_mono: float = math.nan

    @property
    def p_hat(self) -> float:
        return self.failures / self.trials


@dataclass(frozen=True)
class ErrorCurve:
    key: Key
    solver_id: str
    points: tuple[CurvePoint, ...]

    def __post_init__(self):
        Ns = [p.N for p in self.points]
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise ValueError("curve N values must be strictly increasing")

    @property
    def N(self) -> np.ndarray:
        return np.array([p.N for p in self.points])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points], dtype=float)


def make_curve(key: Key, solver_id: str, Ns: Sequence[int], failures: Sequence[int],
               trials: int | Sequence[int], level: float) -> ErrorCurve:
    """Assemble a curve, attaching credible bounds and their antitonic fits."""
    trials = np.broadcast_to(np.asarray(trials), (len(Ns),))
    bounds = [jeffreys_interval(int(f), int(t), level) for f, t in zip(failures, trials)]
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    p = np.asarray(failures, dtype=float) / trials
    lo_m, hi_m, p_m = (antitonic_pava(x, trials) for x in (lo, hi, p))
    points = tuple(
        CurvePoint(int(N), int(f), int(t), float(l), float(h), float(lm), float(hm), float(pm))
        for N, f, t, l, h, lm, hm, pm in zip(Ns, failures, trials, lo, hi, lo_m, hi_m, p_m)
    )
    return ErrorCurve(key, solver_id, points)


@dataclass(frozen=True)
class NInterval:
    lo: float
    hi: float
    censored: bool = False
    point: float = math.nan  # crossing of the regressed point estimate

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lo {self.lo} > hi {self.hi}")


def _crossing(Ns: np.ndarray, p: np.ndarray, target: float) -> tuple[float, bool]:
    """First N where a non-increasing curve reaches ``target``; (max N, True) if never."""
    below = np.flatnonzero(p <= target)
    if len(below) == 0:
        return float(Ns[-1]), True
    j = below[0]
    if j == 0:
        return float(Ns[0]), False
    x0, x1 = math.log(Ns[j - 1]), math.log(Ns[j])
    p0, p1 = p[j - 1], p[j]
    # p1 = 0 sits at -inf in log space, so the crossing is at the left end;
    # this keeps crossings of pointwise-ordered curves ordered
    t = (math.log(p0 / target) / math.log(p0 / p1)) if p1 > 0 else 0.0
    return float(math.exp(x0 + t * (x1 - x0))), False


def n_at_target(curve: ErrorCurve, p_target: float = 0.01) -> NInterval:
    """Query-count interval at which the error curve crosses ``p_target``.

    The upper bound of the error curve crossing gives the interval's upper
    end, the lower bound its lower end.  Interpolation is linear in
    ``(log N, log p)``.  No crossing within the measured range censors the
    upper end at the largest N.
    """
    Ns = curve.N.astype(float)
    hi, censored = _crossing(Ns, curve.column("hi_mono"), p_target)
    lo, _ = _crossing(Ns, curve.column("lo_mono"), p_target)
    point, _ = _crossing(Ns, curve.column("p_mono"), p_target)
    return NInterval(lo, hi, censored, point)


def average_over_keys(intervals: Sequence[NInterval]) -> NInterval:
    if not intervals:
        raise ValueError("need at least one interval")
    return NInterval(
        float(np.mean([i.lo for i in intervals])),
        float(np.mean([i.hi for i in intervals])),
        any(i.censored for i in intervals),
        float(np.mean([i.point for i in intervals])),
    )


# ---------------------------------------------------------------------------
# resampling

def estimate_error(pool: QueryBatch, solver: Callable[[QueryBatch, np.random.Generator], KeyEstimate],
                   key: Key, N: int, trials: int = 2000,
                   rng: np.random.Generator | None = None) -> tuple[int, int]:
    """``(failures, trials)`` for ``trials`` random size-N subsets of the pool.

    Reference route: every subset is drawn without replacement and handed to
    the solver as a batch.
    """
    if N > len(pool):
        raise ValueError(f"N={N} exceeds pool size {len(pool)}")
    rng = np.random.default_rng() if rng is None else rng
    failures = 0
    for _ in range(trials):
        idx = rng.choice(len(pool), size=N, replace=False)
        failures += solver(pool.subset(idx), rng).key != key
    return failures, trials


def random_orders(pool_size: int, trials: int, length: int, rng: np.random.Generator) -> np.ndarray:
    """``trials`` uniformly random orderings of the pool, truncated to ``length``."""
    orders = np.tile(np.arange(pool_size, dtype=np.int32), (trials, 1))
    rng.permuted(orders, axis=1, out=orders)
    return orders[:, :length]


def resample_failures(pool: QueryBatch, solver_id: str, key: Key, Ns: Sequence[int], trials: int,
                      rng: np.random.Generator, eta_a: float = 0.0, chunk: int = 64,
                      orders: np.ndarray | None = None) -> np.ndarray:
    """Failure counts at every N in ``Ns`` (vectorized route).

    Each trial draws one random ordering of the pool; its size-N subset is
    the first N records of that ordering, so every subset is marginally a
    uniform draw without replacement.  Solver decisions come from prefix sums
    of :func:`record_features`.
    """
    Ns = np.asarray(Ns, dtype=int)
    if Ns.max() > len(pool):
        raise ValueError(f"N={Ns.max()} exceeds pool size {len(pool)}")
    if orders is not None:
        trials = len(orders)
    feats = record_features(solver_id, pool)
    truth = key.to_int()
    failures = np.zeros(len(Ns), dtype=np.int64)
    for start in range(0, trials, chunk):
        size = min(chunk, trials - start)
        block = (orders[start:start + size] if orders is not None
                 else random_orders(len(pool), size, int(Ns.max()), rng))
        sums = np.cumsum(feats[block[:, : Ns.max()]], axis=1)[:, Ns - 1]
        chosen = decide(solver_id, sums, Ns, pool.calibration, eta_a, rng)
        failures += (chosen != truth).sum(axis=0)
    return failures


def error_curve(pool: QueryBatch, solver_id: str, key: Key, Ns: Sequence[int], trials: int,
                rng: np.random.Generator, level: float | None = None, eta_a: float = 0.0) -> ErrorCurve:
    if solver_id not in SOLVERS:
        raise KeyError(solver_id)
    level = default_credible_level(key.n) if level is None else level
    failures = resample_failures(pool, solver_id, key, Ns, trials, rng, eta_a=eta_a)
    return make_curve(key, solver_id, Ns, failures, trials, level)


def log_grid(n_max: int, per_decade: int = 10, n_min: int = 1) -> list[int]:
    """Log-spaced integer grid from ``n_min`` to ``n_max`` inclusive, deduplicated."""
    decades = math.log10(n_max / n_min)
    count = int(round(decades * per_decade)) + 1
    grid = np.unique(np.round(np.logspace(math.log10(n_min), math.log10(n_max), count)).astype(int))
    return [int(g) for g in grid]
