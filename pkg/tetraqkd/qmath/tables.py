from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from tetraqkd.qmath.checks import SCALAR_TOL

LETTERS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class JointTable:
    """Joint probability table, one axis per party.

    ``total`` is the expected sum: 1 for distributions, the state trace for tables
    computed from subnormalized operators.
    """

    probs: np.ndarray
    labels: tuple[tuple[str, ...], ...]
    parties: tuple[str, ...]
    total: float = 1.0

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float)
        labels = tuple(tuple(ax) for ax in self.labels)
        parties = tuple(self.parties)
        if p.ndim != len(labels) or p.ndim != len(parties):
            raise ValueError("one label axis and one party name per table dimension")
        if tuple(len(ax) for ax in labels) != p.shape:
            raise ValueError(f"labels {labels} do not match table shape {p.shape}")
        if len(set(parties)) != len(parties):
            raise ValueError(f"duplicate party names {parties}")
        if p.size and p.min() < 0:
            raise ValueError("table entries must be non-negative")
        if abs(p.sum() - self.total) > SCALAR_TOL:
            raise ValueError(f"table sums to {p.sum():.15f}, expected {self.total}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "parties", parties)

    @classmethod
    def from_counts(
        cls,
        counts: np.ndarray,
        labels: Sequence[Sequence[str]],
        parties: Sequence[str],
    ) -> JointTable:
        c = np.asarray(counts, dtype=float)
        n = c.sum()
        if n <= 0:
            raise ValueError("empty counts")
        return cls(c / n, tuple(tuple(ax) for ax in labels), tuple(parties))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    def axis(self, party: str | int) -> int:
        if isinstance(party, int):
            return party
        try:
            return self.parties.index(party)
        except ValueError:
            raise ValueError(f"unknown party {party!r}; have {self.parties}") from None

    def marginal(self, parties: Sequence[str | int]) -> JointTable:
        keep = [self.axis(p) for p in parties]
        if len(set(keep)) != len(keep):
            raise ValueError("a party may appear only once in a marginal")
        drop = tuple(i for i in range(self.probs.ndim) if i not in keep)
        p = self.probs.sum(axis=drop)
        # surviving axes are in ascending order; put them in the requested order
        ascending = sorted(keep)
        p = np.transpose(p, [ascending.index(k) for k in keep])
        return JointTable(
            p,
            tuple(self.labels[k] for k in keep),
            tuple(self.parties[k] for k in keep),
            total=self.total,
        )

    def conditional(self, given: str | int) -> np.ndarray:
        """p(rest | given) with the conditioned axis first; rows with zero mass stay zero."""
        ax = self.axis(given)
        p = np.moveaxis(self.probs, ax, 0)
        mass = p.reshape(p.shape[0], -1).sum(axis=1)
        out = np.zeros_like(p)
        nz = mass > 0
        out[nz] = p[nz] / mass[nz].reshape((-1,) + (1,) * (p.ndim - 1))
        return out

    def sample(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, ...]:
        """n i.i.d. outcomes by inverse CDF over the flattened table, one index array per party."""
        if n < 0:
            raise ValueError("sample size must be non-negative")
        cdf = np.cumsum(self.probs.ravel())
        cdf /= cdf[-1]
        flat = np.searchsorted(cdf, rng.random(n), side="right")
        flat = np.minimum(flat, cdf.size - 1)
        return tuple(ix.astype(np.int8) for ix in np.unravel_index(flat, self.shape))

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (*(self.labels[ax][i] for ax, i in enumerate(idx)), float(self.probs[idx]))
            for idx in product(*(range(n) for n in self.shape))
        ]
        return pd.DataFrame(rows, columns=[*self.parties, "probability"])

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)


def tetrahedron_table(noise: float, parties: Sequence[str]) -> JointTable:
    """4×4 table with diagonal noise/16 and off-diagonal (4 − noise)/48."""
    same = noise / 16.0
    diff = (4.0 - noise) / 48.0
    p = np.full((4, 4), diff)
    np.fill_diagonal(p, same)
    return JointTable(p, (LETTERS, LETTERS), tuple(parties))
