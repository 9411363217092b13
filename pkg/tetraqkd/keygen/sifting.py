"""One round of the two-way sifting scheme.

Alice announces pairs of positions holding equal letters. Bob says whether his two
letters differ. If they do, he announces the partition of {A,B,C,D} that puts his
two letters together and randomly labels the two blocks 0 and 1. Alice's bit is
the label of the block holding her letter, Bob's is the label of the block that
does not hold his. Pairs where Bob's letters agree carry one letter per party into
the next round.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from tetraqkd.qmath.checks import InvariantViolation
from tetraqkd.qmath.tables import LETTERS

# The three ways to split four letters into two pairs.
PARTITIONS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))

_COMPLEMENT = np.zeros((4, 4, 2), dtype=np.int8)
for _a in range(4):
    for _b in range(4):
        if _a != _b:
            _COMPLEMENT[_a, _b] = [c for c in range(4) if c not in (_a, _b)]


@dataclass(frozen=True)
class LetterSequence:
    """Letters 0..3 with provenance.

    Row i of ``origins`` lists the 2^(depth−1) transmitted pairs that position i
    stands for.
    """

    letters: np.ndarray
    origins: np.ndarray
    depth: int = 1

    def __post_init__(self) -> None:
        letters = np.asarray(self.letters, dtype=np.int8)
        origins = np.asarray(self.origins, dtype=np.int64)
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if origins.ndim == 1:
            origins = origins[:, None]
        if origins.shape != (letters.size, 2 ** (self.depth - 1)):
            raise ValueError(
                f"origins shape {origins.shape} does not fit {letters.size} letters"
                f" at depth {self.depth}"
            )
        if letters.size and (letters.min() < 0 or letters.max() > 3):
            raise ValueError("letters must be in 0..3")
        if np.unique(origins).size != origins.size:
            raise ValueError("provenance indices must be unique")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "origins", origins)

    @classmethod
    def fresh(cls, letters: np.ndarray) -> LetterSequence:
        letters = np.asarray(letters, dtype=np.int8)
        return cls(letters, np.arange(letters.size, dtype=np.int64)[:, None], depth=1)

    @classmethod
    def from_symbols(cls, symbols: str) -> LetterSequence:
        return cls.fresh(np.array([LETTERS.index(s) for s in symbols], dtype=np.int8))

    def __len__(self) -> int:
        return int(self.letters.size)

    def symbols(self) -> str:
        return "".join(LETTERS[i] for i in self.letters)


@dataclass(frozen=True)
class AnnouncementTranscript:
    """Public messages of one round, in announcement order."""

    first: np.ndarray
    second: np.ndarray
    distinct: np.ndarray
    zero_group: np.ndarray
    one_group: np.ndarray

    def __post_init__(self) -> None:
        positions = np.concatenate([self.first, self.second])
        if np.unique(positions).size != positions.size:
            raise InvariantViolation("a position was announced twice")
        if self.zero_group.shape != (int(self.distinct.sum()), 2):
            raise InvariantViolation("one grouping per distinct-letter verdict")
        blocks = np.sort(np.concatenate([self.zero_group, self.one_group], axis=1), axis=1)
        if blocks.size and not (blocks == np.arange(4)).all():
            raise InvariantViolation("announced grouping is not a partition into two pairs")

    def verdicts(self) -> list[str]:
        return ["distinct-letters" if d else "same-letter" for d in self.distinct]

    def to_messages(self) -> list[str]:
        messages = []
        groups = iter(zip(self.zero_group, self.one_group))
        for i, j, d in zip(self.first, self.second, self.distinct):
            messages.append(f"alice: ({i}, {j})")
            if d:
                zero, one = next(groups)
                messages.append(
                    f"bob: distinct {{{LETTERS[zero[0]]},{LETTERS[zero[1]]}}}=0 "
                    f"{{{LETTERS[one[0]]},{LETTERS[one[1]]}}}=1"
                )
            else:
                messages.append("bob: same")
        return messages


@dataclass(frozen=True)
class RoundAccounting:
    total: int
    keyed: int
    recycled: int
    discarded: int

    def __post_init__(self) -> None:
        if self.keyed + self.recycled + self.discarded != self.total:
            raise InvariantViolation(
                f"round accounting {self.keyed} + {self.recycled} + {self.discarded}"
                f" != {self.total}"
            )


@dataclass(frozen=True)
class SiftResult:
    alice_bits: np.ndarray
    bob_bits: np.ndarray
    bit_origins: np.ndarray
    alice_leftover: LetterSequence
    bob_leftover: LetterSequence
    transcript: AnnouncementTranscript
    accounting: RoundAccounting

    @property
    def errors(self) -> int:
        return int(np.count_nonzero(self.alice_bits != self.bob_bits))


def key_bits(
    alice_letters: np.ndarray,
    bob_letters: np.ndarray,
    zero_group: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Bits for pairs where Bob's letters differ; ``bob_letters`` is either of his two."""
    zero_group = np.atleast_2d(zero_group)
    alice_in_zero = (np.asarray(alice_letters)[:, None] == zero_group).any(axis=1)
    bob_in_zero = (np.asarray(bob_letters)[:, None] == zero_group).any(axis=1)
    return (~alice_in_zero).astype(np.int8), bob_in_zero.astype(np.int8)


def _check_aligned(alice: LetterSequence, bob: LetterSequence) -> None:
    if len(alice) != len(bob) or alice.depth != bob.depth:
        raise ValueError("sequences differ in length or depth")
    if not np.array_equal(alice.origins, bob.origins):
        raise ValueError("sequences are not aligned by provenance")


def _pair_equal_letters(
    letters: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, int]:
    """Shuffle, then pair consecutive positions within each letter class."""
    order = rng.permutation(letters.size)
    grouped = order[np.argsort(letters[order], kind="stable")]
    counts = np.bincount(letters, minlength=4)
    firsts, seconds = [], []
    start, residual = 0, 0
    for c in counts:
        usable = c - c % 2
        block = grouped[start : start + usable]
        firsts.append(block[0::2])
        seconds.append(block[1::2])
        residual += c - usable
        start += c
    first, second = np.concatenate(firsts), np.concatenate(seconds)
    announce = rng.permutation(first.size)
    return first[announce], second[announce], residual


def sift_round(alice: LetterSequence, bob: LetterSequence, rng: np.random.Generator) -> SiftResult:
    _check_aligned(alice, bob)
    first, second, residual = _pair_equal_letters(alice.letters, rng)

    b1, b2 = bob.letters[first], bob.letters[second]
    distinct = b1 != b2
    labels = rng.integers(0, 2, size=int(distinct.sum()), dtype=np.int8)
    bob_pair = np.sort(np.stack([b1[distinct], b2[distinct]], axis=1), axis=1)
    complement = _COMPLEMENT[bob_pair[:, 0], bob_pair[:, 1]]
    bob_is_zero = (labels == 0)[:, None]
    zero_group = np.where(bob_is_zero, bob_pair, complement)
    one_group = np.where(bob_is_zero, complement, bob_pair)

    kept_first, kept_second = first[distinct], second[distinct]
    alice_bits, bob_bits = key_bits(alice.letters[kept_first], b1[distinct], zero_group)
    bit_origins = np.concatenate([alice.origins[kept_first], alice.origins[kept_second]], axis=1)

    same_first, same_second = first[~distinct], second[~distinct]
    carried = np.concatenate([alice.origins[same_first], alice.origins[same_second]], axis=1)
    depth = alice.depth + 1

    return SiftResult(
        alice_bits=alice_bits,
        bob_bits=bob_bits,
        bit_origins=bit_origins,
        alice_leftover=LetterSequence(alice.letters[same_first], carried, depth),
        bob_leftover=LetterSequence(bob.letters[same_first], carried, depth),
        transcript=AnnouncementTranscript(first, second, distinct, zero_group, one_group),
        accounting=RoundAccounting(
            total=len(alice),
            keyed=2 * kept_first.size,
            recycled=2 * same_first.size,
            discarded=residual,
        ),
    )


class FirstRoundOdds(NamedTuple):
    p_succ: Fraction | float
    p_err: Fraction | float


def enumerate_first_round(eps: Fraction | float) -> FirstRoundOdds:
    """Exhaustive first-round oracle over Alice's letter, Bob's letters, partitions and labels.

    Exact when ``eps`` is a Fraction.
    """
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    p_same = eps * quarter
    p_diff = (4 - eps) / 12
    succ = err = eps * 0
    for a in range(4):
        for b1 in range(4):
            for b2 in range(4):
                weight = quarter * (p_same if b1 == a else p_diff) * (p_same if b2 == a else p_diff)
                if b1 == b2:
                    continue
                for blocks in PARTITIONS:
                    if tuple(sorted((b1, b2))) not in blocks:
                        continue
                    bob_block = tuple(sorted((b1, b2)))
                    other = blocks[1] if blocks[0] == bob_block else blocks[0]
                    for zero in (bob_block, other):
                        alice_bit, bob_bit = key_bits(np.array([a]), np.array([b1]), np.array(zero))
                        succ += weight * half
                        if alice_bit[0] != bob_bit[0]:
                            err += weight * half
    return FirstRoundOdds(succ, err / succ)
