"""Dataset generation and solver evaluation over a configured campaign.

Every random draw is addressed by ``(master_seed, purpose, point, key, ...)``
so results do not depend on the number of worker threads or on task order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..oracle import Key, NoiseModel, OracleMode, build_circuit, sample_shots
from ..readout import generate_calibration, sample_record_voltages
from ..rng import BLOCK_SIZE, block_slices, stream
from ..solvers import SOLVERS, QueryBatch
from ..stats import ErrorCurve, NInterval, average_over_keys, error_curve, n_at_target
from .config import ExperimentConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pool:
    point: int
    key: Key
    mode: OracleMode
    noise: NoiseModel
    batch: QueryBatch
    a: np.ndarray  # true pre-readout bits, kept for diagnostics
    d: np.ndarray

    @property
    def id(self) -> str:
        return f"p{self.point}-k{self.key}-{self.mode.value}"


def generate_pool(key: Key, mode: OracleMode, noise: NoiseModel, size: int, seed: int,
                  point: int = 0, calibration_shots: int = 10_000) -> Pool:
    """Calibrate, then simulate ``size`` oracle queries in fixed-size random blocks."""
    tag = ("pool", point, key.to_int(), mode.value)
    calibration = generate_calibration(noise, calibration_shots, stream(seed, "cal", *tag[1:]))
    circuit = build_circuit(key, mode)
    parts = []
    for b, sl in enumerate(block_slices(size)):
        rng = stream(seed, *tag, b)
        a, d = sample_shots(circuit, noise, sl.stop - sl.start, rng)
        v_a, v_d = sample_record_voltages(a, d, noise, rng)
        parts.append((a, d, v_a, v_d))
    a, d, v_a, v_d = (np.concatenate(x) for x in zip(*parts))
    return Pool(point, key, mode, noise, QueryBatch(v_a, v_d, calibration), a, d)


def seed_lineage(seed: int, pool: Pool, index: int) -> dict:
    return {"master": seed, "stream": ["pool", pool.point, pool.key.to_int(), pool.mode.value,
                                       index // BLOCK_SIZE], "offset": index % BLOCK_SIZE}


@dataclass(frozen=True)
class SummaryRow:
    sweep_param: str
    value: float | None
    solver: str
    key: str  # bit string or "avg"
    interval: NInterval


@dataclass
class CampaignResult:
    config: ExperimentConfig
    pools: dict[tuple[int, str, str], Pool] = field(default_factory=dict)
    curves: dict[tuple[int, str, str], ErrorCurve] = field(default_factory=dict)
    summary: list[SummaryRow] = field(default_factory=list)

    def curve(self, point: int, solver: str, key: Key | str) -> ErrorCurve:
        return self.curves[(point, solver, str(key))]

    def rows(self, solver: str | None = None, key: str | None = None) -> list[SummaryRow]:
        return [r for r in self.summary
                if (solver is None or r.solver == solver) and (key is None or r.key == key)]

    def average(self, solver: str, point: int = 0) -> NInterval:
        points = self.config.noise_points()
        param, value, _ = points[point]
        for r in self.summary:
            if r.solver == solver and r.key == "avg" and r.sweep_param == param and r.value == value:
                return r.interval
        raise KeyError((solver, point))


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def generate_pools(config: ExperimentConfig, threads: int = 1) -> CampaignResult:
    """Simulate every (noise point, key, mode) pool the configured solvers need."""
    config.validate()
    points = config.noise_points()
    result = CampaignResult(config)
    tasks = [(p, key, mode) for p in range(len(points)) for key in config.key_list
             for mode in config.modes]

    def make_pool(task):
        p, key, mode = task
        return generate_pool(key, mode, points[p][2].model(config.n), config.pool_size,
                             config.master_seed, point=p, calibration_shots=config.calibration_shots)

    for (p, key, mode), pool in zip(tasks, _map(make_pool, tasks, threads)):
        result.pools[(p, str(key), mode.value)] = pool
    log.info("generated %d pools of %d queries", len(tasks), config.pool_size)
    return result


def run_campaign(config: ExperimentConfig, threads: int = 1) -> CampaignResult:
    result = generate_pools(config, threads)
    seed = config.master_seed
    points = config.noise_points()
    keys = config.key_list

    tasks = [(p, key, s) for p in range(len(points)) for s in config.solvers for key in keys]

    def make_curve(task):
        p, key, solver = task
        pool = result.pools[(p, str(key), SOLVERS[solver].mode.value)]
        rng = stream(seed, "resample", p, key.to_int(), solver)
        return error_curve(pool.batch, solver, key, config.grid, config.resample_trials, rng,
                           level=config.level, eta_a=points[p][2].eta_a)

    for (p, key, solver), curve in zip(tasks, _map(make_curve, tasks, threads)):
        result.curves[(p, solver, str(key))] = curve
    log.info("evaluated %d error curves", len(tasks))

    for p, (param, value, _) in enumerate(points):
        for solver in config.solvers:
            intervals = []
            for key in keys:
                iv = n_at_target(result.curves[(p, solver, str(key))], config.p_target)
                intervals.append(iv)
                result.summary.append(SummaryRow(param, value, solver, str(key), iv))
            result.summary.append(SummaryRow(param, value, solver, "avg", average_over_keys(intervals)))
    return result
