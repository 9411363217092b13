import numpy as np
import pandas as pd
import pytest

from tetraqkd.keygen.protocol import eve_view, run_sifting
from tetraqkd.keygen.sifting import (
    AnnouncementTranscript,
    LetterSequence,
    RoundAccounting,
    key_bits,
    sift_round,
)
from tetraqkd.qmath.checks import InvariantViolation


def _round(alice: str, bob: str, seed: int = 0):
    return sift_round(
        LetterSequence.from_symbols(alice),
        LetterSequence.from_symbols(bob),
        np.random.default_rng(seed),
    )


def test_key_bit_labels():
    # zero group {A,B}: Alice's A reads 0; Bob holding C,D reads 0 as well
    zero_group = np.array([[0, 1], [0, 1]])
    alice_bits, bob_bits = key_bits(np.array([0, 2]), np.array([2, 0]), zero_group)
    assert alice_bits.tolist() == [0, 1]
    assert bob_bits.tolist() == [0, 1]


@pytest.mark.parametrize("seed", range(6))
def test_alice_letter_outside_bobs_block_gives_agreement(seed):
    result = _round("AA", "CD", seed)
    assert result.alice_bits.size == 1
    assert result.errors == 0


@pytest.mark.parametrize("seed", range(6))
def test_alice_letter_inside_bobs_block_gives_error(seed):
    result = _round("AA", "AB", seed)
    assert result.alice_bits.size == 1
    assert result.errors == 1


def test_equal_bob_letters_are_recycled():
    result = _round("AA", "BB")
    assert result.alice_bits.size == 0
    assert result.alice_leftover.symbols() == "A"
    assert result.bob_leftover.symbols() == "B"
    assert result.alice_leftover.depth == 2
    assert sorted(result.alice_leftover.origins[0].tolist()) == [0, 1]
    assert result.transcript.verdicts() == ["same-letter"]


def test_unpaired_letters_are_discarded():
    result = _round("AAABC", "BCDAB")
    acc = result.accounting
    assert acc.total == 5
    assert acc.keyed + acc.recycled == 2
    assert acc.discarded == 3


def test_transcript_messages():
    result = _round("AACC", "BDCC", seed=3)
    messages = result.transcript.to_messages()
    assert len([m for m in messages if m.startswith("alice:")]) == 2
    assert any(m.startswith("bob: distinct") for m in messages)
    assert "bob: same" in messages


def test_round_accounting_must_balance():
    with pytest.raises(InvariantViolation):
        RoundAccounting(total=4, keyed=2, recycled=0, discarded=1)


def test_transcript_rejects_reused_positions():
    with pytest.raises(InvariantViolation):
        AnnouncementTranscript(
            np.array([0]),
            np.array([0]),
            np.array([False]),
            np.zeros((0, 2), dtype=np.int8),
            np.zeros((0, 2), dtype=np.int8),
        )


def test_letter_sequence_validation():
    with pytest.raises(ValueError):
        LetterSequence(np.array([0, 4]), np.array([0, 1]))
    with pytest.raises(ValueError):
        LetterSequence(np.array([0, 1]), np.array([0, 0]))
    with pytest.raises(ValueError):
        LetterSequence(np.array([0, 1]), np.array([[0, 1], [2, 3]]), depth=1)


def test_misaligned_sequences_are_rejected():
    with pytest.raises(ValueError):
        sift_round(
            LetterSequence.from_symbols("AB"),
            LetterSequence.from_symbols("ABC"),
            np.random.default_rng(0),
        )


def test_accounting_balances_every_round():
    rng = np.random.default_rng(8)
    alice = rng.integers(0, 4, size=4000)
    bob = rng.integers(0, 4, size=4000)
    reports = run_sifting(alice, bob, 3, np.random.default_rng(1), bootstrap=0)
    for report in reports:
        assert report.pairs_spent + report.pairs_carried == report.transmitted
        assert report.keyed + report.recycled + report.discarded == report.letters_in


def test_sifting_is_deterministic():
    rng = np.random.default_rng(4)
    alice = rng.integers(0, 4, size=2000)
    bob = rng.integers(0, 4, size=2000)
    first = run_sifting(alice, bob, 3, np.random.default_rng(9), bootstrap=10)
    second = run_sifting(alice, bob, 3, np.random.default_rng(9), bootstrap=10)
    frame1 = pd.DataFrame([r.to_row() for r in first])
    frame2 = pd.DataFrame([r.to_row() for r in second])
    assert frame1.equals(frame2)


def test_eve_view_counts_in_grouping_frame():
    result = _round("AABB", "CDCD", seed=2)
    assert result.alice_bits.size == 2
    eve = np.zeros(4, dtype=np.int8)
    codes = eve_view(eve, result, outcomes=4)
    # Eve saw A at both positions; A leads whichever block holds it
    in_zero_block = np.ravel_multi_index((2, 0, 0, 0), (3,) * 4)
    in_one_block = np.ravel_multi_index((0, 0, 2, 0), (3,) * 4)
    for code, zero in zip(codes, result.transcript.zero_group):
        assert code == (in_zero_block if 0 in zero else in_one_block)


def test_eve_view_with_fifth_outcome():
    result = _round("AABB", "CDCD", seed=5)
    eve = np.array([4, 0, 4, 4], dtype=np.int8)
    codes = eve_view(eve, result, outcomes=5)
    counts = np.array(np.unravel_index(codes, (3,) * 5)).T
    assert counts[:, 4].sum() == 3
    np.testing.assert_array_equal(counts.sum(axis=1), 2)
