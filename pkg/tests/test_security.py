import numpy as np
import pandas as pd
import pytest

from tetraqkd.channel.information import mutual_information
from tetraqkd.keygen.analytic import iteration_probabilities
from tetraqkd.security.eavesdropper import (
    CountVector,
    EnumerationTooLarge,
    alice_eve_key_table,
    bit_information,
    compositions,
    eve_sequence_probs,
    i_ae_1,
    i_ae_n,
    i_ae_per_iteration,
    i_ae_total,
    key_table_classes,
    log_multinomial,
)
from tetraqkd.security.yields import (
    ThresholdNotBracketed,
    ck_yield,
    six_state_iab,
    six_state_threshold,
    threshold,
    yield_curves,
)


def test_compositions():
    rows = compositions(2)
    assert rows.shape == (10, 4)
    np.testing.assert_array_equal(rows.sum(axis=1), 2)
    assert len({tuple(r) for r in rows}) == 10
    assert compositions(4).shape == (35, 4)


def test_log_multinomial():
    assert np.exp(log_multinomial(np.array([2, 1, 1, 0]))) == pytest.approx(12.0)
    assert np.exp(log_multinomial(np.array([4, 0, 0, 0]))) == pytest.approx(1.0)


def test_sequence_probabilities():
    probs = eve_sequence_probs(1, CountVector(2, 0, 0, 0), eta=0.0)
    # η = 0: Eve never sees Alice's letter, so two A's rule out A for Alice
    assert probs.total == pytest.approx(3 * 0.25 * (1.0 / 3.0) ** 2)
    assert probs.bit0 == pytest.approx(0.25 * (1.0 / 3.0) ** 2)
    with pytest.raises(ValueError):
        eve_sequence_probs(2, CountVector(1, 1, 0, 0), eta=0.5)
    with pytest.raises(ValueError):
        CountVector(-1, 0, 0, 0)


def test_bit_information_limits():
    assert bit_information(1.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert 0.0 < bit_information(0.0, 1) < 1.0
    assert bit_information(0.0, 2) > bit_information(0.0, 1)
    with pytest.raises(EnumerationTooLarge):
        bit_information(0.5, 7)
    with pytest.raises(ValueError):
        bit_information(0.5, 0)
    with pytest.raises(ValueError):
        bit_information(0.5, 1, grouping=((0, 1), (1, 2)))


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.3, 0.5, 2.0 / 3.0])
def test_first_iteration_closed_form(eps):
    assert i_ae_1(eps) == pytest.approx(i_ae_n(eps, 1), abs=1e-12)


@pytest.mark.parametrize("eps", [0.05, 0.3, 0.6])
def test_key_table_reproduces_first_iteration(eps):
    table = alice_eve_key_table(eps)
    assert table.shape == (2, 16)
    per_bit = mutual_information(table)
    p_succ = iteration_probabilities(eps, 1).p_succ_n
    assert p_succ / 2 * per_bit == pytest.approx(i_ae_1(eps), abs=1e-12)


def test_key_table_classes():
    classes = key_table_classes(0.3).set_index("class")
    assert set(classes.index) == {"same-zero", "mixed-zero", "split", "same-one", "mixed-one"}
    assert classes["size"].sum() == 16
    assert classes.loc["split", "size"] == 8
    # split pairs tell Eve nothing about the bit
    assert classes.loc["split", "bit0"] == pytest.approx(classes.loc["split", "bit1"])
    assert classes.loc["same-zero", "bit0"] == pytest.approx(classes.loc["same-one", "bit1"])


def test_grouping_symmetry():
    for grouping in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((2, 3), (0, 1))):
        assert i_ae_n(0.3, 2, grouping) == pytest.approx(i_ae_n(0.3, 2), abs=1e-12)


def test_eve_learns_nothing_without_noise():
    assert i_ae_total(0.0, 5) == pytest.approx(0.0, abs=1e-15)


def test_per_iteration_sum():
    per = i_ae_per_iteration(0.4, 4)
    assert len(per) == 4
    assert sum(per) == pytest.approx(i_ae_total(0.4, 4))


def test_yield_report():
    report = ck_yield(0.1, 3)
    assert report.yield_ck == pytest.approx(report.i_ab_total - report.i_ae_total)
    assert report.yield_ck > 0
    frame = report.to_frame()
    assert list(frame.columns) == ["n", "i_ab_n", "i_ae_n", "yield_n"]
    assert len(frame) == 3
    row = report.to_row()
    assert {"eps", "n_max", "i_ab_total", "i_ae_total", "yield", "i_ab_3", "i_ae_3"} <= set(row)
    with pytest.raises(ValueError):
        ck_yield(0.7, 3)


@pytest.mark.slow
def test_yield_curves_overlap_across_truncations():
    grid = np.linspace(0.0, 2.0 / 3.0, 21)
    curves = yield_curves(grid, [3, 4, 5]).pivot(index="eps", columns="n_max", values="yield")
    assert (curves.max(axis=1) - curves.min(axis=1)).max() < 2.5e-3


@pytest.mark.slow
def test_thresholds():
    t1, t3, t5 = threshold(1), threshold(3), threshold(5)
    assert t1 == pytest.approx(0.409, abs=0.002)
    assert t3 == pytest.approx(0.417, abs=0.002)
    assert abs(t5 - t3) < 1e-3


def test_six_state_information():
    assert six_state_iab(0.0) == pytest.approx(1.0 / 3.0)
    assert six_state_iab(1.0) == pytest.approx(0.0, abs=1e-15)


def test_six_state_threshold_from_overlay():
    eps = np.linspace(0.0, 0.6, 61)
    overlay = pd.DataFrame({"eps": eps, "i_ae": six_state_iab(0.25)})
    assert six_state_threshold(overlay) == pytest.approx(0.25, abs=1e-5)
    with pytest.raises(ThresholdNotBracketed):
        six_state_threshold(pd.DataFrame({"eps": eps, "i_ae": 0.0}))
    with pytest.raises(ValueError):
        six_state_threshold(pd.DataFrame({"eps": eps}))


@pytest.mark.parametrize("n_max", [1, 3])
def test_yield_decreases_with_noise(n_max):
    values = [ck_yield(float(e), n_max).yield_ck for e in np.linspace(0.0, 2.0 / 3.0, 101)]
    assert np.all(np.diff(values) < 0)
