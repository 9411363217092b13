from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from tetraqkd.channel.information import LN2
from tetraqkd.qmath.checks import EIGEN_FLOOR, SCALAR_TOL
from tetraqkd.qmath.operators import DensityOperator, born_joint, min_eigenvalue
from tetraqkd.qmath.tables import LETTERS, JointTable, tetrahedron_table
from tetraqkd.qmath.tetrahedron import SINGLET, povm_from_vectors

SEPARABLE_NOISE = 2.0 / 3.0
AB_PARTIES = ("alice", "bob")


@dataclass(frozen=True)
class NoiseParameter:
    """White-noise fraction ε of the singlet source."""

    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"noise parameter {self.value} outside [0, 1]")

    @property
    def entangled(self) -> bool:
        return self.value < SEPARABLE_NOISE - SCALAR_TOL

    @property
    def separable(self) -> bool:
        return not self.entangled

    def __float__(self) -> float:
        return float(self.value)


def noise_value(eps: float | NoiseParameter) -> float:
    return float(eps) if isinstance(eps, NoiseParameter) else NoiseParameter(float(eps)).value


def is_entangled(eps: float | NoiseParameter) -> bool:
    return NoiseParameter(noise_value(eps)).entangled


def rho_ab(eps: float | NoiseParameter) -> DensityOperator:
    """(1 − ε)|s⟩⟨s| + (ε/4)·1, flagged "separable" from ε = 2/3 on."""
    e = noise_value(eps)
    rho = DensityOperator((1.0 - e) * SINGLET.projector().matrix + (e / 4.0) * np.eye(4))
    return rho.with_flags("separable") if not is_entangled(e) else rho


def joint_probs_ab(eps: float | NoiseParameter) -> JointTable:
    return tetrahedron_table(noise_value(eps), AB_PARTIES)


def born_table_ab(rho: DensityOperator) -> JointTable:
    """p_kl = tr[ρ P_k ⊗ Q_l] for an arbitrary two-qubit operator."""
    povm = povm_from_vectors()
    return born_joint(rho, [(povm, (0,)), (povm, (1,))], parties=AB_PARTIES)


def reconstruct_state(table: JointTable) -> DensityOperator:
    """ρ = Σ_kl (6P_k − 1) p_kl (6Q_l − 1), linear inversion without positivity projection."""
    if table.shape != (4, 4):
        raise ValueError(f"expected a 4×4 table, got {table.shape}")
    if abs(table.probs.sum() - 1.0) > SCALAR_TOL:
        raise ValueError("reconstruction needs a normalized table")
    dual = [6.0 * p - np.eye(2) for p in povm_from_vectors().elements]
    rho = sum(
        table.probs[k, l] * np.kron(dual[k], dual[l]) for k in range(4) for l in range(4)
    )
    return DensityOperator(rho)


@dataclass(frozen=True)
class ReconstructionReport:
    rho: DensityOperator
    min_eigenvalue: float
    trace: float
    max_deviation: float | None = None

    @property
    def physical(self) -> bool:
        return self.min_eigenvalue >= EIGEN_FLOOR


def reconstruction_report(
    table: JointTable,
    reference: DensityOperator | None = None,
) -> ReconstructionReport:
    rho = reconstruct_state(table)
    deviation = None
    if reference is not None:
        deviation = float(np.max(np.abs(rho.matrix - reference.matrix)))
    return ReconstructionReport(rho, min_eigenvalue(rho), rho.trace, deviation)


def accessible_info_ab(eps: float | NoiseParameter) -> float:
    """(1 − ε/4)·log₂[(4 − ε)/3] + (ε/4)·log₂ ε in bits."""
    e = noise_value(eps)
    return float(((1.0 - e / 4.0) * np.log((4.0 - e) / 3.0) + xlogy(e / 4.0, e)) / LN2)


def accessible_info_gain_over_six_state() -> float:
    """Relative surplus of log₂(4/3) over the noiseless 6-state 1/3 bit."""
    return (accessible_info_ab(0.0) - 1.0 / 3.0) / (1.0 / 3.0)


def bob_pair_table(eps: float | NoiseParameter) -> JointTable:
    """Bob's two letters at two positions where Alice holds the same letter (A).

    Entries are (1/4)·p(b₁)p(b₂) with p_s = ε/4 for Bob's A and p_d = (4 − ε)/12
    otherwise; the table carries total mass 1/4, the probability of Alice's letter.
    """
    e = noise_value(eps)
    single = np.full(4, (4.0 - e) / 12.0)
    single[0] = e / 4.0
    return JointTable(
        0.25 * np.outer(single, single),
        (LETTERS, LETTERS),
        ("bob_first", "bob_second"),
        total=0.25,
    )
