"""Eve's purification of the noisy singlet and the ancilla states it induces.

Qubit order throughout: Alice, Bob, Eve₁, Eve₂.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from tetraqkd.channel.source import SEPARABLE_NOISE, NoiseParameter, rho_ab
from tetraqkd.qmath.checks import OPERATOR_TOL, SCALAR_TOL, InvariantViolation, require_close
from tetraqkd.qmath.operators import DensityOperator, PureState, partial_trace
from tetraqkd.qmath.tetrahedron import SINGLET, povm_from_vectors, tetra_states

# s13 s24 from s12 s34 by swapping the middle qubits
_CROSS_ORDER = (0, 2, 1, 3)


@dataclass(frozen=True)
class PurificationParams:
    """β = √ε and α + β/2 = e^{iφ}√(1 − 3ε/4)."""

    eps: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        NoiseParameter(self.eps)
        lhs = abs(self.alpha + self.beta / 2.0) ** 2
        if abs(lhs - (1.0 - 0.75 * self.eps)) > SCALAR_TOL:
            raise InvariantViolation("|α + β/2|² differs from 1 − 3ε/4")

    @property
    def beta(self) -> float:
        return float(np.sqrt(self.eps))

    @property
    def alpha(self) -> complex:
        return complex(np.exp(1j * self.phi) * np.sqrt(1.0 - 0.75 * self.eps) - self.beta / 2.0)

    @property
    def beyond_separability(self) -> bool:
        """True above ε = 2/3, where the construction is valid but the source is separable."""
        return self.eps > SEPARABLE_NOISE + SCALAR_TOL


def _params(params: PurificationParams | float) -> PurificationParams:
    return params if isinstance(params, PurificationParams) else PurificationParams(float(params))


def _label(k: int) -> int:
    if k not in (1, 2, 3, 4):
        raise ValueError(f"outcome label {k} must be one of 1..4")
    return k - 1


def purification(params: PurificationParams | float) -> PureState:
    """|S⟩ = α|s₁₂⟩|s₃₄⟩ + β|s₁₃⟩|s₂₄⟩."""
    p = _params(params)
    s12s34 = SINGLET.tensor(SINGLET)
    s13s24 = s12s34.permuted(_CROSS_ORDER)
    state = PureState(p.alpha * s12s34.amplitudes + p.beta * s13s24.amplitudes)
    require_close(
        partial_trace(state.projector(), (0, 1)).matrix,
        rho_ab(p.eps).matrix,
        OPERATOR_TOL,
        "tr_Eve of the purification",
    )
    return state


@dataclass(frozen=True)
class EveAncillaSet:
    """Unnormalized |E_k⟩ with |S⟩ = Σ_l |l, l̄⟩|E_l⟩."""

    states: tuple[PureState, ...]

    def gram(self) -> np.ndarray:
        vecs = np.array([s.amplitudes for s in self.states])
        return vecs.conj() @ vecs.T

    def recombine(self) -> PureState:
        tetra = tetra_states()
        amps = sum(tetra.pair(l).tensor(self.states[l]).amplitudes for l in range(4))
        return PureState(amps, normalized=False)


def gram_law(eps: float) -> np.ndarray:
    """⟨E_k|E_l⟩ = (2 − 3ε)/16 + (3ε/8)δ_kl."""
    return np.full((4, 4), (2.0 - 3.0 * eps) / 16.0) + (3.0 * eps / 8.0) * np.eye(4)


def eve_components(params: PurificationParams | float) -> EveAncillaSet:
    """|E_k⟩ = α/(2√2)|s⟩ − (β/2)(|k̄ k⟩ + ½|k k̄⟩)."""
    p = _params(params)
    tetra = tetra_states()
    states = tuple(
        PureState(
            p.alpha / (2.0 * np.sqrt(2.0)) * SINGLET.amplitudes
            - (p.beta / 2.0)
            * (tetra.flipped_pair(k).amplitudes + 0.5 * tetra.pair(k).amplitudes),
            normalized=False,
        )
        for k in range(4)
    )
    ancillas = EveAncillaSet(states)
    require_close(ancillas.gram(), gram_law(p.eps), OPERATOR_TOL, "ancilla Gram matrix")
    require_close(
        ancillas.recombine().amplitudes,
        purification(p).amplitudes,
        OPERATOR_TOL,
        "Σ_l |l l̄⟩|E_l⟩",
    )
    return ancillas


def _eve_state_given(psi: PureState, element: np.ndarray, party: int) -> DensityOperator:
    t = psi.amplitudes.reshape(2, 2, 4)
    if party == 0:
        m = np.einsum("ca,abe,cbf->ef", element, t, t.conj())
    else:
        m = np.einsum("cb,abe,acf->ef", element, t, t.conj())
    return DensityOperator(m)


def conditional_ancilla(params: PurificationParams | float, k: int) -> DensityOperator:
    """ρ_E^(k) = tr_AB[(P_k ⊗ 1)|S⟩⟨S|], trace 1/4."""
    idx = _label(k)
    rho = _eve_state_given(purification(params), povm_from_vectors()[idx], party=0)
    if abs(rho.trace - 0.25) > SCALAR_TOL:
        raise InvariantViolation(f"conditional ancilla trace {rho.trace} is not 1/4")
    return rho


def conditional_ancillas(params: PurificationParams | float) -> tuple[DensityOperator, ...]:
    return tuple(conditional_ancilla(params, k) for k in (1, 2, 3, 4))


def bob_conditional_ancilla(params: PurificationParams | float, k: int) -> DensityOperator:
    """tr_AB[(1 ⊗ Q_k)|S⟩⟨S|]."""
    idx = _label(k)
    return _eve_state_given(purification(params), povm_from_vectors()[idx], party=1)


def conditional_ancilla_closed_form(params: PurificationParams | float, k: int) -> DensityOperator:
    """(β²/8)|k̄k̄⟩⟨k̄k̄| + ¼ v v† with v = α|s⟩ − (β/√2)|k̄ k⟩."""
    p = _params(params)
    idx = _label(k)
    tetra = tetra_states()
    bar = tetra.flips[idx].tensor(tetra.flips[idx]).amplitudes
    v = p.alpha * SINGLET.amplitudes - (p.beta / np.sqrt(2.0)) * tetra.flipped_pair(idx).amplitudes
    return DensityOperator((p.eps / 8.0) * np.outer(bar, bar.conj()) + 0.25 * np.outer(v, v.conj()))


def permuted_ancilla(rho: DensityOperator, unitary: np.ndarray) -> DensityOperator:
    """(U ⊗ U) ρ (U ⊗ U)†, the image of a conditional state under a label permutation."""
    return rho.conjugated(np.kron(unitary, unitary))


def ancilla_spectra(states: Sequence[DensityOperator]) -> np.ndarray:
    return np.array([np.sort(s.eigenvalues()) for s in states])
