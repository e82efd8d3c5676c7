"""Experiment configuration and the canned figure reproductions."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Any

from ..oracle import Key, NoiseModel, OracleMode, all_keys, depol_from_fidelity
from ..solvers import SOLVERS
from ..stats import default_credible_level, log_grid

SWEEP_PARAMS = ("eta_a", "eta_d", "two_qubit_depol")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSettings:
    """Device-level noise; ``eta_d`` applies to every data qubit.

    ``two_qubit_depol`` wins over ``fidelity`` when both are given.
    """

    eta_a: float = 0.05
    eta_d: float = 0.3
    fidelity: float | None = 0.91
    two_qubit_depol: float | None = None
    idle_depol: float = 0.0

    def depol(self) -> float:
        if self.two_qubit_depol is not None:
            return self.two_qubit_depol
        return 0.0 if self.fidelity is None else depol_from_fidelity(self.fidelity)

    def model(self, n: int) -> NoiseModel:
        return NoiseModel.uniform(n, eta_a=self.eta_a, eta_d=self.eta_d,
                                  two_qubit_depol=self.depol(), idle_depol=self.idle_depol)


@dataclass(frozen=True)
class Sweep:
    param: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 2
    keys: tuple[str, ...] | str = "all"
    solvers: tuple[str, ...] = ("c_digital", "q_digital")
    noise: NoiseSettings = field(default_factory=NoiseSettings)
    sweep: Sweep | None = None
    pool_size: int = 10_000
    resample_trials: int = 2000
    N_grid: tuple[int, ...] | None = None
    p_target: float = 0.01
    credible_level: float | None = None
    calibration_shots: int = 10_000
    restrict_last_key_bit: bool = False
    master_seed: int = 0
    write_records: bool = True

    # -- derived -------------------------------------------------------------

    @property
    def key_list(self) -> list[Key]:
        if self.keys == "all":
            keys = all_keys(self.n)
        else:
            keys = [Key.from_str(k) for k in self.keys]
        if self.restrict_last_key_bit:
            keys = [k for k in keys if k.bits[-1] == 0]
        return keys

    @property
    def modes(self) -> list[OracleMode]:
        used = {SOLVERS[s].mode for s in self.solvers}
        return [m for m in OracleMode if m in used]

    @property
    def grid(self) -> list[int]:
        return list(self.N_grid) if self.N_grid is not None else log_grid(self.pool_size, 10)

    @property
    def level(self) -> float:
        return default_credible_level(self.n) if self.credible_level is None else self.credible_level

    def noise_points(self) -> list[tuple[str, float | None, NoiseSettings]]:
        """``(sweep_param, value, settings)`` for every noise point."""
        if self.sweep is None:
            return [("none", None, self.noise)]
        return [(self.sweep.param, v, replace(self.noise, **{self.sweep.param: v}))
                for v in self.sweep.values]

    # -- validation / serialization -------------------------------------------

    def validate(self) -> "ExperimentConfig":
        try:
            self._validate()
        except ConfigError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def _validate(self):
        if not 1 <= self.n <= 6:
            raise ConfigError(f"n must be in [1, 6], got {self.n}")
        if self.keys != "all" and not isinstance(self.keys, tuple):
            raise ConfigError("keys must be 'all' or a list of bit strings")
        keys = self.key_list
        if not keys:
            raise ConfigError("key list is empty")
        if any(k.n != self.n for k in keys):
            raise ConfigError(f"every key must have {self.n} bits")
        if not self.solvers:
            raise ConfigError("no solvers requested")
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solvers: {unknown}; choose from {sorted(SOLVERS)}")
        if self.pool_size < 1:
            raise ConfigError("pool_size must be positive")
        if self.resample_trials < 1:
            raise ConfigError("resample_trials must be positive")
        grid = self.grid
        if not grid or min(grid) < 1 or max(grid) > self.pool_size:
            raise ConfigError(f"N_grid must lie in [1, pool_size={self.pool_size}]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("N_grid must be strictly increasing")
        if not 0 < self.p_target < 1:
            raise ConfigError("p_target must be in (0, 1)")
        if self.credible_level is not None and not 0 < self.credible_level < 1:
            raise ConfigError("credible_level must be in (0, 1)")
        if self.calibration_shots < 100:
            raise ConfigError("calibration_shots must be >= 100")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")
        if self.sweep is not None:
            if self.sweep.param not in SWEEP_PARAMS:
                raise ConfigError(f"sweep param must be one of {SWEEP_PARAMS}")
            if not self.sweep.values:
                raise ConfigError("sweep has no values")
        for _, _, settings in self.noise_points():
            settings.model(self.n)  # range checks live in NoiseModel

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["keys"] = self.keys if self.keys == "all" else list(self.keys)
        d["solvers"] = list(self.solvers)
        d["N_grid"] = None if self.N_grid is None else list(self.N_grid)
        if self.sweep is not None:
            d["sweep"] = {"param": self.sweep.param, "values": list(self.sweep.values)}
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        try:
            if "noise" in d and d["noise"] is not None:
                d["noise"] = NoiseSettings(**d["noise"])
            if d.get("sweep") is not None:
                s = d["sweep"]
                d["sweep"] = Sweep(s["param"], tuple(float(v) for v in s["values"]))
            if "keys" in d and d["keys"] != "all":
                d["keys"] = tuple(str(k) for k in d["keys"])
            if "solvers" in d:
                d["solvers"] = tuple(d["solvers"])
            if d.get("N_grid") is not None:
                d["N_grid"] = tuple(int(v) for v in d["N_grid"])
            cfg = cls(**d)
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return cfg.validate()

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(data)


# ---------------------------------------------------------------------------
# canned reproductions

DIGITAL = ("c_digital", "q_digital")
ANALOG = ("c_bayes", "q_analog")


def fig2_config(seed: int = 0) -> ExperimentConfig:
    """n = 2, all keys, digital solvers at the device's best readout."""
    return ExperimentConfig(n=2, solvers=DIGITAL, N_grid=tuple(log_grid(10_000, 5)),
                            master_seed=seed)


def fig3_configs(seed: int = 0) -> dict[str, ExperimentConfig]:
    """Digital and analog solvers for n = 2 and n = 3."""
    grid = tuple(log_grid(10_000, 4))
    return {f"n{n}": ExperimentConfig(n=n, solvers=DIGITAL + ANALOG, N_grid=grid, master_seed=seed)
            for n in (2, 3)}


def fig4_configs(seed: int = 0) -> dict[str, ExperimentConfig]:
    """n = 3 sweeps of ancilla (a) and data (b) readout error."""
    grid = tuple(log_grid(10_000, 5))
    eta_a = tuple(round(0.05 * i, 2) for i in range(1, 10))
    eta_d = (0.2, 0.25, 0.3, 0.35, 0.4)
    return {
        "fig4a": ExperimentConfig(n=3, solvers=("c_bayes", "q_analog", "qprime_analog"),
                                  sweep=Sweep("eta_a", eta_a), N_grid=grid, master_seed=seed),
        "fig4b": ExperimentConfig(n=3, solvers=ANALOG, noise=NoiseSettings(eta_a=0.05),
                                  sweep=Sweep("eta_d", eta_d), N_grid=grid, master_seed=seed),
    }


REPRO = {
    "fig2": lambda seed: {"fig2": fig2_config(seed)},
    "fig3": fig3_configs,
    "fig4": fig4_configs,
}
