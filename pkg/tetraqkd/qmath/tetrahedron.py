"""Tetrahedron geometry and the tetrahedron states built on it.

Gauge: |l⟩ is the +1 eigenvector of t_l·σ with a real, non-negative first
amplitude; |l̄⟩ is its spin flip (a, b) → (−b*, a*). The spin flip commutes
with SU(2), so the phase rules ⟨l|k⟩ = ⟨k̄|l̄⟩ and ⟨l|k̄⟩ = −⟨k|l̄⟩ hold without
further adjustment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from tetraqkd.qmath.checks import (
    OPERATOR_TOL,
    SCALAR_TOL,
    InvariantViolation,
    max_abs,
    require_close,
)
from tetraqkd.qmath.operators import IDENTITY2, PAULI, Povm, PureState, pauli_dot
from tetraqkd.qmath.tables import LETTERS

SINGLET = PureState(np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if self.norm > 1.0 + SCALAR_TOL:
            raise ValueError(f"Bloch vector {self.as_array()} lies outside the unit ball")

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: BlochVector) -> float:
        return float(self.as_array() @ other.as_array())

    def sigma(self) -> np.ndarray:
        return pauli_dot(self.as_array())


@lru_cache(maxsize=1)
def tetrahedron_vectors() -> tuple[BlochVector, ...]:
    """The four (±1,±1,±1)/√3 vertices with an even number of minus signs."""
    r = 1.0 / np.sqrt(3.0)
    signs = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
    return tuple(BlochVector(r * a, r * b, r * c) for a, b, c in signs)


def _check_tetrahedron(vectors: Sequence[BlochVector]) -> np.ndarray:
    t = np.array([v.as_array() for v in vectors])
    if t.shape != (4, 3):
        raise ValueError(f"expected four Bloch vectors, got {len(vectors)}")
    if max_abs(np.linalg.norm(t, axis=1) - 1.0) > SCALAR_TOL:
        raise ValueError("tetrahedron vectors must have unit norm")
    if max_abs(t.sum(axis=0)) > SCALAR_TOL:
        raise ValueError("tetrahedron vectors must sum to zero")
    return t


def povm_from_vectors(
    vectors: Sequence[BlochVector] | None = None,
    labels: Sequence[str] = LETTERS,
) -> Povm:
    """P_k = (1 + t_k·σ)/4."""
    if vectors is None:
        return _default_povm(tuple(labels))
    t = _check_tetrahedron(vectors)
    return Povm(tuple((IDENTITY2 + pauli_dot(v)) / 4.0 for v in t), tuple(labels))


@lru_cache(maxsize=4)
def _default_povm(labels: tuple[str, ...]) -> Povm:
    return povm_from_vectors(tetrahedron_vectors(), labels)


def spin_flip(state: PureState) -> PureState:
    a, b = state.amplitudes
    return PureState(np.array([-np.conj(b), np.conj(a)]), normalized=state.normalized)


def _bloch_ket(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    if z <= -1.0 + SCALAR_TOL:
        return np.array([0.0, 1.0], dtype=complex)
    return np.array([1.0 + z, x + 1j * y]) / np.sqrt(2.0 * (1.0 + z))


@dataclass(frozen=True)
class TetraStates:
    kets: tuple[PureState, ...]
    flips: tuple[PureState, ...]

    def pair(self, l: int) -> PureState:
        """|l, l̄⟩."""
        return self.kets[l].tensor(self.flips[l])

    def flipped_pair(self, l: int) -> PureState:
        """|l̄, l⟩."""
        return self.flips[l].tensor(self.kets[l])


def tetra_states(vectors: Sequence[BlochVector] | None = None) -> TetraStates:
    if vectors is None:
        return _default_states()
    t = _check_tetrahedron(vectors)
    kets = tuple(PureState(_bloch_ket(v)) for v in t)
    flips = tuple(spin_flip(k) for k in kets)
    states = TetraStates(kets, flips)

    for l, v in enumerate(t):
        up = (IDENTITY2 + pauli_dot(v)) / 2
        require_close(kets[l].projector().matrix, up, OPERATOR_TOL, f"|{l}⟩⟨{l}|")
        require_close(flips[l].projector().matrix, IDENTITY2 - up, OPERATOR_TOL, f"flip of {l}")
        for k in range(4):
            lk, kl = kets[l].inner(kets[k]), flips[k].inner(flips[l])
            require_close(lk, kl, SCALAR_TOL, "⟨l|k⟩ = ⟨k̄|l̄⟩")
            lk, kl = kets[l].inner(flips[k]), -kets[k].inner(flips[l])
            require_close(lk, kl, SCALAR_TOL, "⟨l|k̄⟩ = −⟨k|l̄⟩")
        antisym = (states.pair(l) - states.flipped_pair(l)).scaled(1 / np.sqrt(2))
        if abs(abs(SINGLET.inner(antisym)) - 1.0) > SCALAR_TOL:
            raise InvariantViolation(f"antisymmetrized pair {l} is not the singlet")
    return states


@lru_cache(maxsize=1)
def _default_states() -> TetraStates:
    return tetra_states(tetrahedron_vectors())


def singlet_from_tetra(states: TetraStates | None = None, l: int | None = None) -> PureState:
    """(|l l̄⟩ − |l̄ l⟩)/√2 for a given l, otherwise Σ_l |l l̄⟩/√8."""
    states = tetra_states() if states is None else states
    if l is not None:
        vec = (states.pair(l) - states.flipped_pair(l)).amplitudes / np.sqrt(2)
    else:
        vec = sum(states.pair(k).amplitudes for k in range(4)) / np.sqrt(8)
    return PureState(vec)


def expand_identity(states: TetraStates | None = None) -> np.ndarray:
    """(3/2)Σ_l |l l̄⟩⟨l l̄| − 2|s⟩⟨s|, which equals the two-qubit identity."""
    states = tetra_states() if states is None else states
    total = sum(states.pair(l).projector().matrix for l in range(4))
    return 1.5 * total - 2.0 * SINGLET.projector().matrix


def werner_identity_check(states: TetraStates | None = None) -> np.ndarray:
    """(1/4)Σ_l |l l̄⟩⟨l l̄|, checked against (1/4)(1 − σ_A·σ_B/3)."""
    states = tetra_states() if states is None else states
    mix = sum(states.pair(l).projector().matrix for l in range(4)) / 4.0
    sigma_sigma = sum(np.kron(p, p) for p in PAULI)
    expected = (np.eye(4) - sigma_sigma / 3.0) / 4.0
    require_close(mix, expected, OPERATOR_TOL, "separable Werner mixture")
    return mix


def label_permutation_unitary(
    perm: Sequence[int],
    vectors: Sequence[BlochVector] | None = None,
) -> np.ndarray:
    """SU(2) element U with U (t_k·σ) U† = t_perm[k]·σ.

    Only even permutations of the vertices are rotations; odd ones raise ValueError.
    """
    vectors = tetrahedron_vectors() if vectors is None else vectors
    t = _check_tetrahedron(vectors)
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"{list(perm)} is not a permutation of four labels")
    rot = 0.75 * sum(np.outer(t[perm[k]], t[k]) for k in range(4))
    if np.linalg.det(rot) < 0:
        raise ValueError(f"permutation {list(perm)} is a reflection, not a rotation")

    cos_angle = np.clip((np.trace(rot) - 1.0) / 2.0, -1.0, 1.0)
    angle = float(np.arccos(cos_angle))
    if angle < 1e-12:
        return np.eye(2, dtype=complex)
    if np.pi - angle < 1e-9:
        # half turn: R = 2nnᵀ − 1
        sym = (rot + np.eye(3)) / 2.0
        col = int(np.argmax(np.diag(sym)))
        axis = sym[:, col] / np.sqrt(sym[col, col])
    else:
        axis = np.array([rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]])
        axis /= 2.0 * np.sin(angle)
    unitary = np.cos(angle / 2) * IDENTITY2 - 1j * np.sin(angle / 2) * pauli_dot(axis)

    for k in range(4):
        require_close(
            unitary @ pauli_dot(t[k]) @ unitary.conj().T,
            pauli_dot(t[perm[k]]),
            OPERATOR_TOL,
            "label permutation",
        )
    return unitary
