"""Eve's information about key bits under the incoherent attack.

A key bit of iteration n rests on 2^n transmitted pairs that all carry the same
Alice letter. Eve holds one outcome of her 4-member POVM per pair, each drawn from
the Alice–Eve channel (q_s = η/4 for her letter equal to Alice's, q_d = (4 − η)/12
otherwise), and learns the announced grouping. Her view of a bit is therefore the
count of each letter among her 2^n outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy.special import gammaln, xlogy

from tetraqkd.channel.information import LN2
from tetraqkd.eve.measurement import eta as eta_of
from tetraqkd.keygen.analytic import iteration_probabilities, iteration_table
from tetraqkd.qmath.checks import SCALAR_TOL, InvariantViolation
from tetraqkd.qmath.tables import LETTERS, JointTable

# Letters labelled 0, letters labelled 1.
DEFAULT_GROUPING = ((0, 1), (2, 3))
MAX_EXACT_ITERATION = 6


class EnumerationTooLarge(ValueError):
    """Exact composition sums are only carried out up to MAX_EXACT_ITERATION."""


@dataclass(frozen=True)
class CountVector:
    n_a: int
    n_b: int
    n_c: int
    n_d: int

    def __post_init__(self) -> None:
        if min(self.as_tuple()) < 0:
            raise ValueError(f"letter counts must be non-negative, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_a, self.n_b, self.n_c, self.n_d)

    @property
    def total(self) -> int:
        return sum(self.as_tuple())

    def require_iteration(self, n: int) -> None:
        if self.total != 2**n:
            raise ValueError(f"counts {self.as_tuple()} do not sum to 2^{n}")


class SequenceProbabilities(NamedTuple):
    bit0: float
    bit1: float
    total: float


def _channel(eta: float) -> tuple[float, float]:
    return eta / 4.0, (4.0 - eta) / 12.0


def _check_grouping(grouping: tuple[tuple[int, int], tuple[int, int]]) -> None:
    if sorted(grouping[0] + grouping[1]) != [0, 1, 2, 3]:
        raise ValueError(f"grouping {grouping} is not a partition of the four letters")


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"iteration index must be >= 1, got {n}")
    if n > MAX_EXACT_ITERATION:
        raise EnumerationTooLarge(
            f"exact summation is limited to n <= {MAX_EXACT_ITERATION}, got {n}"
        )


@lru_cache(maxsize=None)
def compositions(total: int, parts: int = 4) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``total``."""
    rows = []
    for bars in combinations(range(total + parts - 1), parts - 1):
        edges = (-1, *bars, total + parts - 1)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(parts)])
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


def log_multinomial(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts)
    return gammaln(counts.sum(axis=-1) + 1.0) - gammaln(counts + 1.0).sum(axis=-1)


def _sequence_probs(
    counts: np.ndarray,
    eta: float,
    grouping: tuple[tuple[int, int], tuple[int, int]],
) -> tuple[np.ndarray, np.ndarray]:
    q_s, q_d = _channel(eta)
    length = counts.sum(axis=-1)
    # (1/4)·q_s^k·q_d^(L−k) for Alice's letter seen k times
    per_letter = 0.25 * np.power(q_s, counts) * np.power(q_d, length[..., None] - counts)
    zero, one = grouping
    return per_letter[..., list(zero)].sum(axis=-1), per_letter[..., list(one)].sum(axis=-1)


def eve_sequence_probs(
    n: int,
    counts: CountVector,
    eta: float,
    grouping: tuple[tuple[int, int], tuple[int, int]] = DEFAULT_GROUPING,
) -> SequenceProbabilities:
    """Probability of one specific Eve sequence with these counts, jointly with each key bit."""
    if n < 1:
        raise ValueError(f"iteration index must be >= 1, got {n}")
    counts.require_iteration(n)
    _check_grouping(grouping)
    q0, q1 = _sequence_probs(np.array(counts.as_tuple()), eta, grouping)
    return SequenceProbabilities(float(q0), float(q1), float(q0 + q1))


def bit_information(
    eta: float,
    n: int,
    grouping: tuple[tuple[int, int], tuple[int, int]] = DEFAULT_GROUPING,
) -> float:
    """I(key bit; Eve's outcomes) per generated bit of iteration n, in bits."""
    _check_n(n)
    _check_grouping(grouping)
    counts = compositions(2**n)
    weight = np.exp(log_multinomial(counts))
    q0, q1 = _sequence_probs(counts, eta, grouping)
    q = q0 + q1
    norm, half = float(weight @ q), float(weight @ q0)
    if abs(norm - 1.0) > SCALAR_TOL or abs(half - 0.5) > SCALAR_TOL:
        raise InvariantViolation(f"sequence probabilities sum to {norm} with bit-0 mass {half}")
    terms = xlogy(q0, q0) - xlogy(q0, q / 2.0) + xlogy(q1, q1) - xlogy(q1, q / 2.0)
    return max(float(weight @ terms) / LN2, 0.0)


def i_ae_n(
    eps: float,
    n: int,
    grouping: tuple[tuple[int, int], tuple[int, int]] = DEFAULT_GROUPING,
) -> float:
    """(p_succ^(n)/2^n)·I(bit; Eve) bits per transmitted pair."""
    _check_n(n)
    stats = iteration_probabilities(eps, n)
    return stats.p_succ_n / 2.0**n * bit_information(eta_of(eps), n, grouping)


def i_ae_1(eps: float) -> float:
    """Closed five-term form for the first iteration."""
    q_s, q_d = _channel(eta_of(eps))
    same_zero = q_s**2 + q_d**2
    ones = q_s**2 + 3.0 * q_d**2
    cross = q_d * (q_s + q_d)
    bracket = (
        xlogy(same_zero, same_zero / 2.0)
        + 4.0 * xlogy(q_d**2, q_d**2)
        + 2.0 * xlogy(q_s * q_d, q_s * q_d)
        - xlogy(ones, ones / 4.0)
        - 2.0 * xlogy(cross, cross / 2.0)
    )
    return iteration_probabilities(eps, 1).p_succ_n / 2.0 * float(bracket) / LN2


def i_ae_per_iteration(eps: float, n_max: int) -> list[float]:
    _check_n(n_max)
    e = eta_of(eps)
    return [
        row.p_succ_n / 2.0**row.n * bit_information(e, row.n)
        for row in iteration_table(eps, n_max)
    ]


def i_ae_total(eps: float, n_max: int) -> float:
    return float(sum(i_ae_per_iteration(eps, n_max)))


def alice_eve_key_table(eps: float) -> JointTable:
    """First-iteration key bit against Eve's ordered letter pair, grouping {A,B}=0 / {C,D}=1."""
    pairs = list(product(range(4), repeat=2))
    counts = np.array([np.bincount(p, minlength=4) for p in pairs])
    q0, q1 = _sequence_probs(counts, eta_of(eps), DEFAULT_GROUPING)
    labels = tuple(LETTERS[a] + LETTERS[b] for a, b in pairs)
    return JointTable(np.stack([q0, q1]), (("0", "1"), labels), ("bit", "eve"))


def _pair_class(a: int, b: int) -> str:
    zero = set(DEFAULT_GROUPING[0])
    if (a in zero) != (b in zero):
        return "split"
    block = "zero" if a in zero else "one"
    return f"{'same' if a == b else 'mixed'}-{block}"


def key_table_classes(eps: float) -> pd.DataFrame:
    """The key table collapsed onto its five symmetry classes, per-pair probabilities."""
    frame = alice_eve_key_table(eps).to_frame()
    frame["class"] = [_pair_class(LETTERS.index(s[0]), LETTERS.index(s[1])) for s in frame["eve"]]
    wide = frame.pivot_table(index=["class", "eve"], columns="bit", values="probability")
    wide = wide.reset_index()
    summary = wide.groupby("class").agg(
        size=("eve", "size"), bit0=("0", "first"), bit1=("1", "first")
    )
    return summary.reset_index()
