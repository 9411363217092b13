from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import pandas as pd

from tetraqkd.channel.source import SEPARABLE_NOISE, joint_probs_ab
from tetraqkd.config import EveConfig, ExperimentConfig
from tetraqkd.eve.measurement import (
    alice_eve_born_table,
    alice_eve_joint,
    eve_povm4,
    eve_povm5,
    optimize_mu,
)
from tetraqkd.eve.purification import PurificationParams, purification
from tetraqkd.qmath.checks import OPERATOR_TOL, require_close
from tetraqkd.qmath.operators import Povm, born_joint
from tetraqkd.qmath.tables import LETTERS, JointTable
from tetraqkd.qmath.tetrahedron import povm_from_vectors

TRIPLE_PARTIES = ("alice", "bob", "eve")
EveSampling = Literal["channel", "purification"]


def triple_distribution(
    eps: float,
    phi: float = 0.0,
    eve_povm: Povm | None = None,
    model: EveSampling = "channel",
) -> JointTable:
    """Alice × Bob × Eve outcome table, 4×4×K.

    ``purification`` is the exact Born rule on the purified source. ``channel``
    keeps the Alice–Bob and Alice–Eve marginals but draws Eve's outcome from
    p(e | Alice's letter) alone, the per-pair model behind the exact I_AE sums.
    """
    povm = eve_povm4(phi) if eve_povm is None else eve_povm
    if model == "purification":
        tetra = povm_from_vectors()
        table = born_joint(
            purification(PurificationParams(eps, phi)),
            [(tetra, (0,)), (tetra, (1,)), (povm, (2, 3))],
            parties=TRIPLE_PARTIES,
        )
    elif model == "channel":
        ab = joint_probs_ab(eps).probs
        eve_given_alice = alice_eve_born_table(eps, phi, povm).conditional("alice")
        table = JointTable(
            ab[:, :, None] * eve_given_alice[:, None, :],
            (LETTERS, LETTERS, povm.labels),
            TRIPLE_PARTIES,
        )
    else:
        raise ValueError(f"unknown Eve sampling model {model!r}")

    ab = table.marginal(["alice", "bob"]).probs
    require_close(ab, joint_probs_ab(eps).probs, OPERATOR_TOL, "Alice–Bob marginal")
    ae = table.marginal(["alice", "eve"]).probs
    born = alice_eve_born_table(eps, phi, povm).probs
    require_close(ae, born, OPERATOR_TOL, "Alice–Eve marginal")
    if len(povm) == 4 and eps <= SEPARABLE_NOISE:
        require_close(ae, alice_eve_joint(eps).probs, OPERATOR_TOL, "Alice–Eve tetrahedron form")
    return table


def eve_povm_for(eve: EveConfig, eps: float) -> Povm:
    if eve.povm == 4:
        return eve_povm4(eve.phi)
    if eve.mu == "optimal":
        mu = optimize_mu(eps, eve.phi).mu if 0.0 < eps < SEPARABLE_NOISE else 0.0
    else:
        mu = float(eve.mu)
    return eve_povm5(eve.phi, mu)


@dataclass(frozen=True)
class SampleRecord:
    index: int
    alice: str
    bob: str
    eve: str


@dataclass(frozen=True)
class SampleBatch:
    """Column-wise samples; letters are indices into ``LETTERS`` and ``eve_labels``."""

    alice: np.ndarray
    bob: np.ndarray
    eve: np.ndarray
    eve_labels: tuple[str, ...]

    def __len__(self) -> int:
        return int(self.alice.size)

    def records(self) -> list[SampleRecord]:
        return [
            SampleRecord(i, LETTERS[a], LETTERS[b], self.eve_labels[e])
            for i, (a, b, e) in enumerate(zip(self.alice, self.bob, self.eve))
        ]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "index": np.arange(len(self)),
                "alice": np.array(LETTERS)[self.alice],
                "bob": np.array(LETTERS)[self.bob],
                "eve": np.array(self.eve_labels)[self.eve],
            }
        )

    def counts(self) -> np.ndarray:
        out = np.zeros((4, 4, len(self.eve_labels)), dtype=np.int64)
        np.add.at(out, (self.alice, self.bob, self.eve), 1)
        return out


def sample_table(table: JointTable, n: int, rng: np.random.Generator) -> SampleBatch:
    alice, bob, eve = table.sample(n, rng)
    return SampleBatch(alice, bob, eve, table.labels[2])


def sample_run(
    cfg: ExperimentConfig,
    rng: np.random.Generator,
    eps: float | None = None,
) -> SampleBatch:
    """Draw ``simulation.pairs`` i.i.d. three-party outcomes for one noise level."""
    eps = cfg.eps if eps is None else eps
    if eps is None:
        raise ValueError("sample_run needs a noise level")
    povm = eve_povm_for(cfg.eve, eps)
    table = triple_distribution(eps, cfg.eve.phi, povm, cfg.eve.sampling)
    return sample_table(table, cfg.simulation.pairs, rng)
