from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from tetraqkd.channel.information import DEFAULT_BOOTSTRAP, MIEstimate, empirical_mi
from tetraqkd.channel.source import joint_probs_ab
from tetraqkd.keygen.sifting import AnnouncementTranscript, LetterSequence, SiftResult, sift_round
from tetraqkd.qmath.checks import InvariantViolation

NAN = float("nan")


@dataclass(frozen=True)
class IterationReport:
    """Empirical outcome of one sifting round, rates per transmitted pair."""

    n: int
    transmitted: int
    letters_in: int
    keyed: int
    recycled: int
    discarded: int
    pairs_spent: int
    pairs_carried: int
    bits: int
    errors: int
    eps_hat: float
    eps_hat_se: float
    p_succ_hat: float
    p_succ_se: float
    p_err_hat: float
    p_err_se: float
    i_ab_hat: float
    i_ab_se: float
    i_ab_bias: float
    i_ae_hat: float = NAN
    i_ae_se: float = NAN
    i_ae_bias: float = NAN
    transcript: AnnouncementTranscript | None = field(default=None, compare=False, repr=False)

    def to_row(self) -> dict[str, float]:
        row = asdict(self)
        row.pop("transcript")
        return row


def _rate_estimate(mi: MIEstimate, rate: float, transmitted: int) -> tuple[float, float, float]:
    """Scale a per-bit MI estimate by the bit rate; delta-method standard error."""
    rate_se = np.sqrt(rate * (1.0 - rate) / transmitted)
    se = np.hypot(mi.bits * rate_se, rate * mi.stderr)
    return rate * mi.bits, float(se), rate * mi.bias


def eve_view(
    eve_letters: np.ndarray,
    result: SiftResult,
    outcomes: int,
) -> np.ndarray:
    """Eve's outcome counts behind each key bit, in the frame of the announced grouping.

    Column order: the two zero-block letters, the two one-block letters, then the
    fifth outcome when Eve uses five. Returns one integer code per bit.
    """
    seen = np.asarray(eve_letters)[result.bit_origins]
    n_bits, width = seen.shape
    frame = np.concatenate([result.transcript.zero_group, result.transcript.one_group], axis=1)
    slot_of = np.empty((n_bits, outcomes), dtype=np.int64)
    rows = np.arange(n_bits)
    for j in range(4):
        slot_of[rows, frame[:, j]] = j
    if outcomes == 5:
        slot_of[:, 4] = 4
    slots = slot_of[rows[:, None], seen]
    counts = np.zeros((n_bits, outcomes), dtype=np.int64)
    np.add.at(counts, (np.repeat(rows, width), slots.ravel()), 1)
    return np.ravel_multi_index(tuple(counts.T), (width + 1,) * outcomes)


def _contingency(bits: np.ndarray, codes: np.ndarray) -> np.ndarray:
    _, index = np.unique(codes, return_inverse=True)
    table = np.zeros((2, int(index.max()) + 1 if index.size else 1))
    np.add.at(table, (bits.astype(np.int64), index.ravel()), 1)
    return table


def run_sifting(
    alice_letters: np.ndarray,
    bob_letters: np.ndarray,
    max_iter: int,
    rng: np.random.Generator,
    eve_letters: np.ndarray | None = None,
    eve_outcomes: int = 4,
    bootstrap: int = DEFAULT_BOOTSTRAP,
    keep_transcripts: bool = False,
) -> list[IterationReport]:
    """Iterate sift_round on sampled letters and estimate per-round rates."""
    transmitted = int(np.asarray(alice_letters).size)
    alice = LetterSequence.fresh(alice_letters)
    bob = LetterSequence.fresh(bob_letters)
    reports: list[IterationReport] = []
    spent = 0
    for n in range(1, max_iter + 1):
        m = len(alice)
        if m < 2:
            logging.debug("Round %d has %d letters; stopping", n, m)
            break
        weight = 2 ** (n - 1)
        agree = float(np.mean(alice.letters == bob.letters))
        result = sift_round(alice, bob, rng)
        acc = result.accounting
        spent += (acc.keyed + acc.discarded) * weight
        carried = acc.recycled * weight
        if spent + carried != transmitted:
            raise InvariantViolation(
                f"round {n}: spent {spent} + carried {carried} != transmitted {transmitted}"
            )

        bits = int(result.alice_bits.size)
        rate = bits / transmitted
        p_err = result.errors / bits if bits else NAN
        if bits:
            contingency = np.zeros((2, 2))
            np.add.at(contingency, (result.alice_bits, result.bob_bits), 1)
            i_ab, i_ab_se, i_ab_bias = _rate_estimate(
                empirical_mi(contingency, bootstrap, rng), rate, transmitted
            )
        else:
            i_ab = i_ab_se = i_ab_bias = NAN

        eve_fields: dict[str, float] = {}
        if eve_letters is not None and bits:
            codes = eve_view(eve_letters, result, eve_outcomes)
            estimate = empirical_mi(_contingency(result.alice_bits, codes), bootstrap, rng)
            i_ae, i_ae_se, i_ae_bias = _rate_estimate(estimate, rate, transmitted)
            eve_fields = {"i_ae_hat": i_ae, "i_ae_se": i_ae_se, "i_ae_bias": i_ae_bias}

        reports.append(
            IterationReport(
                n=n,
                transmitted=transmitted,
                letters_in=m,
                keyed=acc.keyed,
                recycled=acc.recycled,
                discarded=acc.discarded,
                pairs_spent=spent,
                pairs_carried=carried,
                bits=bits,
                errors=result.errors,
                eps_hat=4.0 * agree,
                eps_hat_se=4.0 * float(np.sqrt(agree * (1.0 - agree) / m)),
                p_succ_hat=2**n * rate,
                p_succ_se=2**n * float(np.sqrt(rate * (1.0 - rate) / transmitted)),
                p_err_hat=p_err,
                p_err_se=float(np.sqrt(p_err * (1.0 - p_err) / bits)) if bits else NAN,
                i_ab_hat=i_ab,
                i_ab_se=i_ab_se,
                i_ab_bias=i_ab_bias,
                transcript=result.transcript if keep_transcripts else None,
                **eve_fields,
            )
        )
        logging.debug(
            "Round %d: %d bits, %d errors, %d letters carried",
            n, bits, result.errors, acc.recycled // 2,
        )
        alice, bob = result.alice_leftover, result.bob_leftover
    return reports


def run_protocol(
    eps: float,
    n_pairs: int,
    max_iter: int,
    rng: np.random.Generator,
    bootstrap: int = DEFAULT_BOOTSTRAP,
) -> list[IterationReport]:
    """Sample Alice–Bob letters from the source and run the sifting rounds."""
    if n_pairs < 2:
        logging.warning("n_pairs = %d leaves nothing to pair; returning no reports", n_pairs)
        return []
    alice, bob = joint_probs_ab(eps).sample(n_pairs, rng)
    return run_sifting(alice, bob, max_iter, rng, bootstrap=bootstrap)
