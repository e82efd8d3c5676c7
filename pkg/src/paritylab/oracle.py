"""Parity-oracle circuits and their noisy measurement statistics.

Qubit 0 is the ancilla ``A``; qubits ``1..n`` are the data register
``D_1..D_n``.  Outcome tables are numpy arrays of shape ``(2,) * (n + 1)``
indexed as ``table[a, d_1, ..., d_n]``.

Two backends are provided:

* :func:`sample_shots` / :func:`sample_shot` -- stochastic Pauli-frame
  sampling, O(gates) per shot and vectorized over shots.
* :func:`exact_outcome_distribution` -- full density-matrix evolution, used
  as the reference the sampler is checked against.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

MAX_EXACT_N = 6


class DimensionError(ValueError):
    """Register too large for the dense reference backend."""


@dataclass(frozen=True)
class Key:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not 1 <= len(bits) <= MAX_EXACT_N:
            raise ValueError(f"key length must be in [1, {MAX_EXACT_N}], got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"key bits must be 0/1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @classmethod
    def from_str(cls, s: str) -> "Key":
        return cls(tuple(int(c) for c in s.strip()))

    @classmethod
    def from_int(cls, value: int, n: int) -> "Key":
        """``k_1`` is the most significant bit, so ``from_int(1, 2)`` is ``01``."""
        if not 0 <= value < 2**n:
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls(tuple((value >> (n - 1 - i)) & 1 for i in range(n)))

    def to_int(self) -> int:
        return reduce(lambda acc, b: (acc << 1) | b, self.bits, 0)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int8)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def all_keys(n: int) -> list[Key]:
    return [Key.from_int(i, n) for i in range(2**n)]


class OracleMode(enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


@dataclass(frozen=True)
class NoiseModel:
    """Gate and readout error parameters.

    ``two_qubit_depol`` is the probability that a CNOT is followed by one of
    the 15 non-identity two-qubit Paulis (chosen uniformly).  ``idle_depol``
    is the probability of a uniformly chosen X/Y/Z on each qubit just before
    measurement.  ``eta_a`` and ``eta_d`` are readout assignment errors; they
    only enter through the voltage model in :mod:`paritylab.readout`.
    """

    two_qubit_depol: float = 0.0
    idle_depol: float = 0.0
    eta_a: float = 0.0
    eta_d: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "eta_d", tuple(float(e) for e in self.eta_d))
        for name in ("two_qubit_depol", "idle_depol"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {p}")
        if not 0.0 <= self.eta_a <= 0.5:
            raise ValueError(f"eta_a must be in [0, 0.5], got {self.eta_a}")
        if any(not 0.0 <= e <= 0.5 for e in self.eta_d):
            raise ValueError(f"eta_d entries must be in [0, 0.5], got {self.eta_d}")

    @property
    def n(self) -> int:
        return len(self.eta_d)

    @classmethod
    def uniform(cls, n: int, *, eta_a: float = 0.0, eta_d: float = 0.0,
                two_qubit_depol: float = 0.0, idle_depol: float = 0.0) -> "NoiseModel":
        return cls(two_qubit_depol, idle_depol, eta_a, (eta_d,) * n)

    @classmethod
    def noiseless(cls, n: int) -> "NoiseModel":
        return cls.uniform(n)


def depol_from_fidelity(avg_fidelity: float, d: int = 4) -> float:
    """Depolarizing parameter from a randomized-benchmarking average fidelity.

    ``p = (1 - F) * d / (d - 1)``.
    """
    if not 0.5 < avg_fidelity <= 1.0:
        raise ValueError(f"average fidelity must be in (0.5, 1], got {avg_fidelity}")
    return (1.0 - avg_fidelity) * d / (d - 1)


@dataclass(frozen=True)
class Gate:
    name: str  # "H" or "CNOT"
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class CircuitSpec:
    n: int
    mode: OracleMode
    gates: tuple[Gate, ...]

    @property
    def num_qubits(self) -> int:
        return self.n + 1

    @property
    def cnot_count(self) -> int:
        return sum(g.name == "CNOT" for g in self.gates)


@dataclass(frozen=True)
class ShotOutcome:
    a: int
    d: tuple[int, ...]


def build_circuit(key: Key, mode: OracleMode) -> CircuitSpec:
    n = key.n
    gates = [Gate("H", (i,)) for i in range(1, n + 1)]
    gates += [Gate("CNOT", (i, 0)) for i in range(1, n + 1) if key.bits[i - 1]]
    if mode is OracleMode.QUANTUM:
        gates += [Gate("H", (q,)) for q in range(n + 1)]
    return CircuitSpec(n, mode, tuple(gates))


# Pauli index p in 0..3 = I, X, Y, Z.  Two-qubit index = 4 * p_first + p_second.
_X_BIT = np.array([0, 1, 1, 0], dtype=bool)
_Z_BIT = np.array([0, 0, 1, 1], dtype=bool)


def sample_shots(circuit: CircuitSpec, noise: NoiseModel, shots: int,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Pauli-frame sampling of ``shots`` measurement outcomes.

    Returns ``(a, d)`` with shapes ``(shots,)`` and ``(shots, n)``, dtype int8.

    The frame starts with a random Z on every qubit, which leaves ``|0...0>``
    unchanged but randomizes the branch of every non-deterministic
    measurement.  Outcomes are the frame's X component XORed onto the
    all-zero reference sample, which every parity-oracle circuit can emit
    (it is the ``D = 0`` branch).
    """
    nq = circuit.num_qubits
    x = np.zeros((shots, nq), dtype=bool)
    z = rng.random((shots, nq)) < 0.5
    p2 = noise.two_qubit_depol
    for gate in circuit.gates:
        if gate.name == "H":
            (q,) = gate.qubits
            x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
        elif gate.name == "CNOT":
            c, t = gate.qubits
            x[:, t] ^= x[:, c]
            z[:, c] ^= z[:, t]
            if p2 > 0:
                hit = rng.random(shots) < p2
                which = rng.integers(1, 16, size=shots)
                pc, pt = which // 4, which % 4
                x[:, c] ^= hit & _X_BIT[pc]
                z[:, c] ^= hit & _Z_BIT[pc]
                x[:, t] ^= hit & _X_BIT[pt]
                z[:, t] ^= hit & _Z_BIT[pt]
        else:
            raise ValueError(f"unsupported gate {gate.name}")
    if noise.idle_depol > 0:
        hit = rng.random((shots, nq)) < noise.idle_depol
        which = rng.integers(1, 4, size=(shots, nq))
        x ^= hit & _X_BIT[which]
    out = x.astype(np.int8)
    return out[:, 0], out[:, 1:]


def sample_shot(circuit: CircuitSpec, noise: NoiseModel, rng: np.random.Generator) -> ShotOutcome:
    a, d = sample_shots(circuit, noise, 1, rng)
    return ShotOutcome(int(a[0]), tuple(int(b) for b in d[0]))


def empirical_distribution(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    n = d.shape[1]
    bits = np.column_stack([a, d]).astype(np.int64)
    weights = 1 << np.arange(n, -1, -1)
    counts = np.bincount(bits @ weights, minlength=2 ** (n + 1))
    return (counts / counts.sum()).reshape((2,) * (n + 1))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


# ---------------------------------------------------------------------------
# dense reference backend

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _embed(ops: dict[int, np.ndarray], nq: int) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit q (qubit 0 most significant)."""
    return reduce(np.kron, [ops.get(q, _PAULIS[0]) for q in range(nq)])


def _cnot(c: int, t: int, nq: int) -> np.ndarray:
    dim = 2**nq
    u = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        bits = [(idx >> (nq - 1 - q)) & 1 for q in range(nq)]
        if bits[c]:
            bits[t] ^= 1
        u[int("".join(map(str, bits)), 2), idx] = 1.0
    return u


def _depolarize(rho: np.ndarray, qubits: tuple[int, ...], p: float, nq: int) -> np.ndarray:
    if p == 0:
        return rho
    paulis = [
        _embed(dict(zip(qubits, (_PAULIS[i] for i in idx))), nq)
        for idx in itertools.product(range(4), repeat=len(qubits))
    ][1:]
    mixed = sum(P @ rho @ P.conj().T for P in paulis)
    return (1 - p) * rho + p / len(paulis) * mixed


def exact_outcome_distribution(circuit: CircuitSpec, noise: NoiseModel) -> np.ndarray:
    """Exact pre-readout outcome probabilities by density-matrix evolution."""
    if circuit.n > MAX_EXACT_N:
        raise DimensionError(f"n={circuit.n} exceeds the dense backend limit of {MAX_EXACT_N}")
    nq = circuit.num_qubits
    dim = 2**nq
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    for gate in circuit.gates:
        if gate.name == "H":
            u = _embed({gate.qubits[0]: _HADAMARD}, nq)
            rho = u @ rho @ u.conj().T
        else:
            u = _cnot(*gate.qubits, nq)
            rho = u @ rho @ u.conj().T
            rho = _depolarize(rho, gate.qubits, noise.two_qubit_depol, nq)
    for q in range(nq):
        rho = _depolarize(rho, (q,), noise.idle_depol, nq)
    # round-off can leave -1e-17 entries
    probs = np.clip(np.real(np.diag(rho)), 0.0, None)
    return probs.reshape((2,) * nq)
