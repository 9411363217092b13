from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from tetraqkd.qmath.checks import (
    EIGEN_FLOOR,
    OPERATOR_TOL,
    SCALAR_TOL,
    InvariantViolation,
    is_power_of_two,
    max_abs,
)
from tetraqkd.qmath.tables import JointTable

MAX_DIM = 16

IDENTITY2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _qubit_count(dim: int) -> int:
    if not is_power_of_two(dim) or dim > MAX_DIM:
        raise ValueError(f"dimension {dim} is not a power of two up to {MAX_DIM}")
    return dim.bit_length() - 1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def pauli_dot(vector: Sequence[float] | np.ndarray) -> np.ndarray:
    """t·σ for a real 3-vector."""
    x, y, z = (float(c) for c in vector)
    return x * PAULI[0] + y * PAULI[1] + z * PAULI[2]


def kron(*factors: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex) if factors[0].ndim == 2 else np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


@dataclass(frozen=True)
class PureState:
    """State vector over n ≤ 4 qubits, qubit 0 most significant."""

    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        amps = _frozen(np.ravel(self.amplitudes))
        _qubit_count(amps.size)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm_squared - 1.0) > SCALAR_TOL:
            raise InvariantViolation(f"state norm² {self.norm_squared:.15f} is not 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_qubits(self) -> int:
        return _qubit_count(self.dim)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def inner(self, other: PureState) -> complex:
        """⟨self|other⟩."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: PureState) -> PureState:
        return PureState(
            np.kron(self.amplitudes, other.amplitudes),
            normalized=self.normalized and other.normalized,
        )

    def projector(self) -> DensityOperator:
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def permuted(self, order: Sequence[int]) -> PureState:
        """Reorder qubits: new qubit i is old qubit order[i]."""
        n = self.n_qubits
        _check_order(order, n)
        amps = self.amplitudes.reshape((2,) * n).transpose(tuple(order)).reshape(-1)
        return PureState(amps, normalized=self.normalized)

    def scaled(self, factor: complex) -> PureState:
        return PureState(factor * self.amplitudes, normalized=False)

    def __add__(self, other: PureState) -> PureState:
        return PureState(self.amplitudes + other.amplitudes, normalized=False)

    def __sub__(self, other: PureState) -> PureState:
        return PureState(self.amplitudes - other.amplitudes, normalized=False)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian operator on qubits. Subnormalized operators keep their trace."""

    matrix: np.ndarray
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        _qubit_count(m.shape[0])
        gap = max_abs(m - m.conj().T)
        if gap > SCALAR_TOL:
            raise InvariantViolation(f"operator is not Hermitian (deviation {gap:.3e})")
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return _qubit_count(self.dim)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_positive(self, floor: float = EIGEN_FLOOR) -> bool:
        return min_eigenvalue(self) >= floor

    def expectation(self, operator: np.ndarray) -> float:
        return float(np.trace(self.matrix @ operator).real)

    def tensor(self, other: DensityOperator) -> DensityOperator:
        return DensityOperator(np.kron(self.matrix, other.matrix))

    def conjugated(self, unitary: np.ndarray) -> DensityOperator:
        return DensityOperator(unitary @ self.matrix @ unitary.conj().T, self.flags)

    def permuted(self, order: Sequence[int]) -> DensityOperator:
        n = self.n_qubits
        _check_order(order, n)
        axes = tuple(order) + tuple(n + o for o in order)
        t = self.matrix.reshape((2,) * (2 * n)).transpose(axes)
        return DensityOperator(t.reshape(self.dim, self.dim), self.flags)

    def with_flags(self, *flags: str) -> DensityOperator:
        return DensityOperator(self.matrix, self.flags | frozenset(flags))


def min_eigenvalue(op: DensityOperator) -> float:
    return float(op.eigenvalues()[0])


def normalized(op: DensityOperator) -> DensityOperator:
    tr = op.trace
    if tr <= 0:
        raise ValueError("cannot normalize an operator with non-positive trace")
    return DensityOperator(op.matrix / tr, op.flags)


def _check_order(order: Sequence[int], n: int) -> None:
    if sorted(order) != list(range(n)):
        raise ValueError(f"{list(order)} is not a permutation of {n} qubits")


def _check_subsystems(indices: Sequence[int], n: int) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if not idx:
        raise ValueError("subsystem selection is empty")
    if len(set(idx)) != len(idx) or any(i < 0 or i >= n for i in idx):
        raise ValueError(f"invalid subsystem indices {list(idx)} for {n} qubits")
    return idx


def partial_trace(op: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Trace out every qubit not in ``keep``. Kept qubits stay in ascending order."""
    n = op.n_qubits
    kept = sorted(_check_subsystems(keep, n))
    t = op.matrix.reshape((2,) * (2 * n))
    remaining = n
    for q in reversed(range(n)):
        if q in kept:
            continue
        t = np.trace(t, axis1=q, axis2=q + remaining)
        remaining -= 1
    d = 2 ** len(kept)
    return DensityOperator(t.reshape(d, d))


@dataclass(frozen=True)
class Povm:
    """Ordered positive operators summing to identity."""

    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        elems = tuple(_frozen(e) for e in self.elements)
        if len(elems) != len(self.labels):
            raise ValueError("one label per POVM element is required")
        dim = elems[0].shape[0]
        _qubit_count(dim)
        for label, e in zip(self.labels, elems):
            if e.shape != (dim, dim):
                raise ValueError(f"element {label} has shape {e.shape}, expected {(dim, dim)}")
            if max_abs(e - e.conj().T) > OPERATOR_TOL:
                raise InvariantViolation(f"POVM element {label} is not Hermitian")
            if np.linalg.eigvalsh(e)[0] < EIGEN_FLOOR:
                raise InvariantViolation(f"POVM element {label} is not positive")
        gap = max_abs(sum(elems) - np.eye(dim))
        if gap > OPERATOR_TOL:
            raise InvariantViolation(f"POVM elements do not sum to identity ({gap:.3e})")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_vectors(cls, vectors: Sequence[np.ndarray], labels: Sequence[str]) -> Povm:
        return cls(tuple(np.outer(v, np.conj(v)) for v in vectors), tuple(labels))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n_qubits(self) -> int:
        return _qubit_count(self.dim)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.elements[k]

    def stack(self) -> np.ndarray:
        return np.stack(self.elements)

    def ranks(self) -> list[int]:
        return [int(np.linalg.matrix_rank(e, tol=1e-9)) for e in self.elements]


def born_joint(
    state: DensityOperator | PureState,
    povms: Sequence[tuple[Povm, Sequence[int]]],
    parties: Sequence[str] | None = None,
) -> JointTable:
    """Joint outcome table of local POVMs on disjoint qubit groups; other qubits are ignored."""
    rho = state.projector() if isinstance(state, PureState) else state
    n = rho.n_qubits
    groups = [_check_subsystems(qubits, n) for _, qubits in povms]
    covered = [q for g in groups for q in g]
    if len(set(covered)) != len(covered):
        raise ValueError("POVMs must act on disjoint subsystems")
    for (povm, _), g in zip(povms, groups):
        if povm.n_qubits != len(g):
            raise ValueError(f"{povm.n_qubits}-qubit POVM assigned to {len(g)} qubits")

    reduced = partial_trace(rho, covered) if len(covered) < n else rho
    # partial_trace sorts kept qubits; map each covered qubit to its position there
    position = {q: i for i, q in enumerate(sorted(covered))}
    reduced = reduced.permuted([position[q] for q in covered])

    dims = [2 ** len(g) for g in groups]
    tensor = reduced.matrix.reshape(dims + dims)
    letters = iter(string.ascii_letters)
    outs, rows, cols = ([next(letters) for _ in groups] for _ in range(3))
    operands: list[np.ndarray] = [tensor]
    terms = ["".join(rows) + "".join(cols)]
    for (povm, _), o, r, c in zip(povms, outs, rows, cols):
        operands.append(povm.stack())
        terms.append(o + c + r)
    subscripts = ",".join(terms) + "->" + "".join(outs)
    probs = np.einsum(subscripts, *operands)

    if max_abs(probs.imag) > SCALAR_TOL:
        raise InvariantViolation("Born probabilities have an imaginary part")
    probs = probs.real
    if probs.min() < -SCALAR_TOL:
        raise InvariantViolation(f"negative Born probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    if parties is not None:
        names = tuple(parties)
    else:
        names = tuple(f"q{'_'.join(map(str, g))}" for g in groups)
    return JointTable(probs, tuple(p.labels for p, _ in povms), names, total=rho.trace)
