from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from tetraqkd.channel.information import mutual_information
from tetraqkd.channel.source import SEPARABLE_NOISE
from tetraqkd.eve.purification import PurificationParams, conditional_ancillas, purification
from tetraqkd.qmath.checks import SCALAR_TOL
from tetraqkd.qmath.operators import DensityOperator, Povm, born_joint
from tetraqkd.qmath.tables import LETTERS, JointTable, tetrahedron_table
from tetraqkd.qmath.tetrahedron import SINGLET, povm_from_vectors, tetra_states

AE_PARTIES = ("alice", "eve")
FIFTH_LABEL = "X"
MU_MAX = 0.5
# Gains at or below this are rounding noise, reported as exactly zero.
GAIN_FLOOR = 1e-12


def _eve_vectors(phi: float) -> list[np.ndarray]:
    tetra = tetra_states()
    phase = np.exp(-1j * phi)
    head = (1.0 + np.sqrt(3.0) * phase) / 2.0
    return [
        head * SINGLET.amplitudes + np.sqrt(1.5) * phase * tetra.flipped_pair(l).amplitudes
        for l in range(4)
    ]


def eve_povm4(phi: float = 0.0) -> Povm:
    """Projectors onto |e_l⟩ = ((1 + √3e^{−iφ})/2)|s⟩ + √(3/2)e^{−iφ}|l̄ l⟩."""
    return Povm.from_vectors(_eve_vectors(phi), LETTERS)


def eve_povm5(phi: float = 0.0, mu: float = 0.0) -> Povm:
    """|e_j⟩ − μΣ_l|e_l⟩ for j = 1..4 plus √(2μ − 4μ²)Σ_l|e_l⟩."""
    if not 0.0 <= mu <= MU_MAX:
        raise ValueError(f"mu {mu} outside [0, {MU_MAX}]")
    vecs = _eve_vectors(phi)
    total = sum(vecs)
    shifted = [v - mu * total for v in vecs]
    fifth = np.sqrt(max(2.0 * mu - 4.0 * mu * mu, 0.0)) * total
    return Povm.from_vectors([*shifted, fifth], (*LETTERS, FIFTH_LABEL))


def eta(eps: float) -> float:
    """Alice–Eve noise parameter (√(1 − 3ε/4) − √(3ε/4))²."""
    if not 0.0 <= eps <= SEPARABLE_NOISE + SCALAR_TOL:
        raise ValueError(f"eta is defined for eps in [0, 2/3], got {eps}")
    eps = min(eps, SEPARABLE_NOISE)
    return float((np.sqrt(1.0 - 0.75 * eps) - np.sqrt(0.75 * eps)) ** 2)


def alice_eve_joint(eps: float) -> JointTable:
    """Tetrahedron-form table with ε replaced by η(ε)."""
    return tetrahedron_table(eta(eps), AE_PARTIES)


def alice_eve_born_table(eps: float, phi: float = 0.0, povm: Povm | None = None) -> JointTable:
    """Born-rule Alice–Eve table from the purification; Bob's qubit is traced out."""
    povm = eve_povm4(phi) if povm is None else povm
    return born_joint(
        purification(PurificationParams(eps, phi)),
        [(povm_from_vectors(), (0,)), (povm, (2, 3))],
        parties=AE_PARTIES,
    )


def alice_eve_table_from_ancillas(
    ancillas: Sequence[DensityOperator],
    povm: Povm,
) -> JointTable:
    """q(k, j) = tr[ρ_E^(k) M_j]; equal to the Born table, cheaper inside searches."""
    probs = np.einsum("kab,jba->kj", np.array([a.matrix for a in ancillas]), povm.stack()).real
    return JointTable(np.clip(probs, 0.0, None), (LETTERS, povm.labels), AE_PARTIES)


def alice_eve_mutual_information(eps: float, phi: float = 0.0, povm: Povm | None = None) -> float:
    """Per-letter I(Alice; Eve) in bits for the given Eve POVM (4-member by default)."""
    return mutual_information(alice_eve_born_table(eps, phi, povm))


@dataclass(frozen=True)
class MuOptimum:
    mu: float
    gain: float
    i4: float
    i5: float

    @property
    def relative_gain(self) -> float:
        return self.gain / self.i4 if self.i4 > 0 else 0.0


def optimize_mu(
    eps: float,
    phi: float = 0.0,
    grid_points: int = 51,
    xtol: float = 1e-6,
) -> MuOptimum:
    """Best μ for the 5-member POVM: coarse grid, then bounded Brent refinement."""
    if not 0.0 < eps < SEPARABLE_NOISE:
        raise ValueError(f"optimize_mu needs eps in (0, 2/3), got {eps}")
    ancillas = conditional_ancillas(PurificationParams(eps, phi))

    def info(mu: float) -> float:
        return mutual_information(alice_eve_table_from_ancillas(ancillas, eve_povm5(phi, mu)))

    i4 = info(0.0)
    grid = np.linspace(0.0, MU_MAX, grid_points)
    values = np.array([info(float(m)) for m in grid])
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid_points - 1)]
    res = minimize_scalar(
        lambda m: -info(float(m)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xtol},
    )
    mu, i5 = float(grid[best]), float(values[best])
    if -res.fun > i5:
        mu, i5 = float(res.x), float(-res.fun)
    if i5 - i4 <= GAIN_FLOOR:
        return MuOptimum(0.0, 0.0, i4, i4)
    return MuOptimum(mu, i5 - i4, i4, i5)


def five_member_boundary(
    phi: float = 0.0,
    lo: float = 0.05,
    hi: float = 0.3,
    xtol: float = 1e-4,
) -> float:
    """Noise level above which the fifth POVM element stops helping Eve."""

    def excess(eps: float) -> float:
        return optimize_mu(eps, phi).gain - GAIN_FLOOR

    root = bisect(excess, lo, hi, xtol=xtol)
    logging.info("Five-member POVM gain vanishes at eps = %.4f", root)
    return float(root)
