"""Key-learning strategies over batches of analog query records.

Five solvers:

=================  ===========  =====================================================
id                 oracle mode  strategy
=================  ===========  =====================================================
``c_digital``      classical    disagreement minimization on digitized bits
``q_digital``      quantum      postselect ``a = 1``, bitwise majority vote
``c_bayes``        classical    Gaussian-likelihood posterior over all keys
``q_analog``       quantum      postselect, average data voltages, calibrated threshold
``qprime_analog``  quantum      average all data voltages, threshold at ``eta_a = 0.5``
=================  ===========  =====================================================

Besides the per-batch ``solve_*`` functions, every solver is expressed as an
additive per-record feature matrix plus a decision rule on feature sums
(:func:`record_features`, :func:`decide`).  The resampling harness uses that
form to evaluate many nested subsets at once via prefix sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .oracle import Key, OracleMode
from .readout import CalibrationSet, QueryRecord, calibrated_threshold, digitize

# floor for rescaled sigmas in the Bayesian likelihood (noise-free calibration)
SIGMA_FLOOR = 1e-6


class EmptyBatchError(ValueError):
    pass


@dataclass(frozen=True)
class QueryBatch:
    v_a: np.ndarray  # (N,)
    v_d: np.ndarray  # (N, n)
    calibration: CalibrationSet

    def __post_init__(self):
        v_a = np.asarray(self.v_a, dtype=float).reshape(-1)
        v_d = np.asarray(self.v_d, dtype=float)
        v_d = v_d.reshape(0, self.calibration.n) if v_d.size == 0 else v_d.reshape(len(v_a), -1)
        if v_d.shape[1] != self.calibration.n:
            raise ValueError(f"records have n={v_d.shape[1]}, calibration has n={self.calibration.n}")
        object.__setattr__(self, "v_a", v_a)
        object.__setattr__(self, "v_d", v_d)

    @property
    def n(self) -> int:
        return self.calibration.n

    def __len__(self) -> int:
        return len(self.v_a)

    @classmethod
    def from_records(cls, records: Sequence[QueryRecord], calibration: CalibrationSet) -> "QueryBatch":
        n = calibration.n
        if any(r.n != n for r in records):
            raise ValueError("all records must match the calibration register size")
        v_a = np.array([r.v_a for r in records], dtype=float)
        v_d = np.array([r.v_d for r in records], dtype=float).reshape(len(records), n)
        return cls(v_a, v_d, calibration)

    def records(self) -> list[QueryRecord]:
        return [QueryRecord(float(a), tuple(d)) for a, d in zip(self.v_a, self.v_d)]

    def subset(self, idx) -> "QueryBatch":
        return QueryBatch(self.v_a[idx], self.v_d[idx], self.calibration)


@dataclass(frozen=True)
class KeyEstimate:
    key: Key
    score: float
    tie_broken: bool = False


def key_matrix(n: int) -> np.ndarray:
    """All n-bit keys as rows, row ``i`` = ``Key.from_int(i, n)``."""
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)


def _rng(rng):
    return np.random.default_rng() if rng is None else rng


def _pick(candidates: np.ndarray, rng) -> tuple[int, bool]:
    if len(candidates) == 1:
        return int(candidates[0]), False
    return int(rng.choice(candidates)), True


def _require_records(batch: QueryBatch):
    if len(batch) == 0:
        raise EmptyBatchError("solver needs at least one query record")


def digitize_batch(batch: QueryBatch) -> tuple[np.ndarray, np.ndarray]:
    """Digitize every voltage at its qubit's calibrated midpoint."""
    cal = batch.calibration
    a = digitize(batch.v_a, cal.ancilla.midpoint)
    d = np.column_stack([digitize(batch.v_d[:, i], p.midpoint) for i, p in enumerate(cal.data)])
    return a.reshape(-1), d.reshape(len(batch), batch.n)


# ---------------------------------------------------------------------------
# classical digital: disagreement minimization

def c_digital_distances(batch: QueryBatch) -> np.ndarray:
    """Hamming disagreement between observed ``a`` and ``d . k mod 2`` for every key."""
    a, d = digitize_batch(batch)
    predicted = (d.astype(np.int64) @ key_matrix(batch.n).T.astype(np.int64)) % 2
    return (predicted != a[:, None]).sum(axis=0)


def solve_c_digital(batch: QueryBatch, rng: np.random.Generator | None = None) -> KeyEstimate:
    _require_records(batch)
    dist = c_digital_distances(batch)
    k, tie = _pick(np.flatnonzero(dist == dist.min()), _rng(rng))
    return KeyEstimate(Key.from_int(k, batch.n), float(dist[k]), tie)


# ---------------------------------------------------------------------------
# quantum digital: postselection + majority vote

def solve_q_digital(batch: QueryBatch, rng: np.random.Generator | None = None) -> KeyEstimate:
    rng = _rng(rng)
    a, d = digitize_batch(batch)
    kept = d[a == 1]
    ones = kept.sum(axis=0)
    margin = 2 * ones - len(kept)
    coins = rng.integers(0, 2, size=batch.n)
    bits = np.where(margin > 0, 1, np.where(margin < 0, 0, coins))
    tie = bool((margin == 0).any())
    return KeyEstimate(Key(tuple(bits)), float(np.abs(margin).min()), tie)


# ---------------------------------------------------------------------------
# classical Bayesian

def _rescaled_voltages(batch: QueryBatch):
    cal = batch.calibration
    cols = [batch.v_a, *batch.v_d.T]
    v, sig = [], []
    for col, p in zip(cols, cal.params):
        span = p.mu1 - p.mu0
        v.append((col - p.mu0) / span)
        sig.append(max(p.pooled_sigma / span, SIGMA_FLOOR))
    return np.column_stack(v), np.array(sig)


def c_bayes_record_loglik(batch: QueryBatch) -> np.ndarray:
    """Per-record log-likelihood of every key, shape (N, 2**n).

    Each record marginalizes the unknown true data string ``D`` under a
    uniform prior:  ``log sum_D exp[-(V_A - D.k mod 2)^2 / 2s_A^2]
    * prod_i exp[-(V_Di - D_i)^2 / 2s_i^2]``.
    """
    if not (np.isfinite(batch.v_a).all() and np.isfinite(batch.v_d).all()):
        raise ValueError("non-finite voltages")
    v, sig = _rescaled_voltages(batch)
    strings = key_matrix(batch.n)  # candidate data strings D, same enumeration as keys
    va, vd = v[:, 0], v[:, 1:]
    ll_d = -(((vd[:, None, :] - strings[None, :, :]) ** 2) / (2 * sig[1:] ** 2)).sum(axis=2)
    ll_a = -((va[:, None] - np.array([0.0, 1.0])[None, :]) ** 2) / (2 * sig[0] ** 2)
    parity = (strings.astype(np.int64) @ strings.T.astype(np.int64)) % 2  # [D, k]
    terms = ll_d[:, :, None] + ll_a[:, parity]  # (N, D, k)
    return logsumexp(terms, axis=1)


def c_bayes_log_posterior(batch: QueryBatch) -> np.ndarray:
    """Unnormalized log posterior over keys, starting from a uniform prior."""
    if len(batch) == 0:
        return np.zeros(2**batch.n)
    return c_bayes_record_loglik(batch).sum(axis=0)


def _argmax_ties(scores: np.ndarray) -> np.ndarray:
    best = scores.max()
    tol = 1e-9 * max(1.0, abs(best))
    return np.flatnonzero(scores >= best - tol)


def solve_c_bayes(batch: QueryBatch, rng: np.random.Generator | None = None) -> KeyEstimate:
    _require_records(batch)
    post = c_bayes_log_posterior(batch)
    k, tie = _pick(_argmax_ties(post), _rng(rng))
    return KeyEstimate(Key.from_int(k, batch.n), float(post[k]), tie)


# ---------------------------------------------------------------------------
# analog quantum solvers

def analog_thresholds(calibration: CalibrationSet, eta_a: float) -> np.ndarray:
    return np.array([calibrated_threshold(p, eta_a) for p in calibration.data])


def _average_and_threshold(v_d: np.ndarray, thresholds: np.ndarray, n: int, rng) -> KeyEstimate:
    if len(v_d) == 0:
        bits = rng.integers(0, 2, size=n)
        return KeyEstimate(Key(tuple(bits)), 0.0, True)
    avg = v_d.mean(axis=0)
    bits = digitize(avg, thresholds).reshape(n)
    return KeyEstimate(Key(tuple(bits)), float(np.abs(avg - thresholds).min()))


def solve_q_analog(batch: QueryBatch, eta_a: float, rng: np.random.Generator | None = None) -> KeyEstimate:
    a = digitize(batch.v_a, batch.calibration.ancilla.midpoint).reshape(-1)
    thr = analog_thresholds(batch.calibration, eta_a)
    return _average_and_threshold(batch.v_d[a == 1], thr, batch.n, _rng(rng))


def solve_qprime_analog(batch: QueryBatch, rng: np.random.Generator | None = None) -> KeyEstimate:
    _require_records(batch)
    thr = analog_thresholds(batch.calibration, 0.5)
    return _average_and_threshold(batch.v_d, thr, batch.n, _rng(rng))


# ---------------------------------------------------------------------------
# registry and the prefix-sum form

@dataclass(frozen=True)
class SolverInfo:
    id: str
    mode: OracleMode
    analog: bool
    solve: Callable[..., KeyEstimate]


SOLVERS: dict[str, SolverInfo] = {
    "c_digital": SolverInfo("c_digital", OracleMode.CLASSICAL, False, solve_c_digital),
    "q_digital": SolverInfo("q_digital", OracleMode.QUANTUM, False, solve_q_digital),
    "c_bayes": SolverInfo("c_bayes", OracleMode.CLASSICAL, True, solve_c_bayes),
    "q_analog": SolverInfo("q_analog", OracleMode.QUANTUM, True, solve_q_analog),
    "qprime_analog": SolverInfo("qprime_analog", OracleMode.QUANTUM, True, solve_qprime_analog),
}


def run_solver(solver_id: str, batch: QueryBatch, eta_a: float, rng=None) -> KeyEstimate:
    info = SOLVERS[solver_id]
    if solver_id == "q_analog":
        return info.solve(batch, eta_a, rng)
    return info.solve(batch, rng)


def record_features(solver_id: str, batch: QueryBatch) -> np.ndarray:
    """Per-record features whose sums over a subset determine the solver's answer."""
    if solver_id == "c_digital":
        a, d = digitize_batch(batch)
        predicted = (d.astype(np.int64) @ key_matrix(batch.n).T.astype(np.int64)) % 2
        return (predicted != a[:, None]).astype(np.float64)
    if solver_id == "q_digital":
        a, d = digitize_batch(batch)
        return np.column_stack([a, a[:, None] * d]).astype(np.float64)
    if solver_id == "c_bayes":
        return c_bayes_record_loglik(batch)
    if solver_id == "q_analog":
        a = digitize(batch.v_a, batch.calibration.ancilla.midpoint).reshape(-1).astype(np.float64)
        return np.column_stack([a, a[:, None] * batch.v_d])
    if solver_id == "qprime_analog":
        return batch.v_d.astype(np.float64)
    raise KeyError(solver_id)


def _random_argbest(scores: np.ndarray, best_mask: np.ndarray, rng) -> np.ndarray:
    """Index of a uniformly chosen True entry of ``best_mask`` along the last axis."""
    u = rng.random(scores.shape)
    return np.where(best_mask, u, -1.0).argmax(axis=-1)


def decide(solver_id: str, sums: np.ndarray, sizes: np.ndarray, calibration: CalibrationSet,
           eta_a: float, rng: np.random.Generator) -> np.ndarray:
    """Key indices chosen by a solver from feature sums.

    ``sums`` has shape ``(..., G, f)`` where axis ``G`` runs over subset sizes
    ``sizes``.  Returns integer key indices of shape ``(..., G)``.
    """
    n = calibration.n
    weights = 1 << np.arange(n - 1, -1, -1)
    if solver_id == "c_digital":
        return _random_argbest(sums, sums == sums.min(axis=-1, keepdims=True), rng)
    if solver_id == "c_bayes":
        best = sums.max(axis=-1, keepdims=True)
        tol = 1e-9 * np.maximum(1.0, np.abs(best))
        return _random_argbest(sums, sums >= best - tol, rng)
    if solver_id == "q_digital":
        kept, ones = sums[..., :1], sums[..., 1:]
        margin = 2 * ones - kept
        coins = rng.integers(0, 2, size=margin.shape)
        bits = np.where(margin > 0, 1, np.where(margin < 0, 0, coins))
        return bits @ weights
    if solver_id == "q_analog":
        kept, tot = sums[..., :1], sums[..., 1:]
        thr = analog_thresholds(calibration, eta_a)
        with np.errstate(invalid="ignore", divide="ignore"):
            bits = (tot / kept > thr).astype(np.int64)
        coins = rng.integers(0, 2, size=bits.shape)
        bits = np.where(kept > 0, bits, coins)
        return bits @ weights
    if solver_id == "qprime_analog":
        thr = analog_thresholds(calibration, 0.5)
        avg = sums / np.asarray(sizes, dtype=float)[:, None]
        return (avg > thr).astype(np.int64) @ weights
    raise KeyError(solver_id)
