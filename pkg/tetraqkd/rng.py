from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class RNGManager:
    """Seeded generators. Trial i always gets SeedSequence(seed, spawn_key=(i,)),
    so serial and parallel runs draw identical streams."""

    seed: int

    def __post_init__(self) -> None:
        self.numpy = np.random.default_rng(self.seed)

    def stream(self, index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(index,)))
