import numpy as np
import pytest

from tetraqkd.channel.information import (
    binary_entropy,
    empirical_mi,
    mutual_information,
)
from tetraqkd.channel.source import (
    NoiseParameter,
    accessible_info_ab,
    accessible_info_gain_over_six_state,
    bob_pair_table,
    born_table_ab,
    is_entangled,
    joint_probs_ab,
    reconstruct_state,
    reconstruction_report,
    rho_ab,
)
from tetraqkd.qmath.operators import DensityOperator
from tetraqkd.qmath.tables import JointTable


def _random_state(rng: np.random.Generator) -> DensityOperator:
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)


def test_accessible_information_at_zero_noise():
    assert accessible_info_ab(0.0) == pytest.approx(np.log2(4.0 / 3.0), abs=1e-12)
    assert accessible_info_ab(0.0) == pytest.approx(0.415, abs=1e-3)
    assert accessible_info_gain_over_six_state() == pytest.approx(0.245, abs=1e-3)


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.3, 2.0 / 3.0, 1.0])
def test_accessible_information_is_table_mutual_information(eps):
    assert mutual_information(joint_probs_ab(eps)) == pytest.approx(
        accessible_info_ab(eps), abs=1e-12
    )


def test_accessible_information_vanishes_for_white_noise():
    assert accessible_info_ab(1.0) == pytest.approx(0.0, abs=1e-15)


def test_joint_table_entries():
    table = joint_probs_ab(0.4)
    assert table.probs[0, 0] == pytest.approx(0.4 / 16)
    assert table.probs[0, 1] == pytest.approx(3.6 / 48)
    np.testing.assert_allclose(table.marginal(["alice"]).probs, 0.25)


def test_noise_parameter_range_and_flags():
    with pytest.raises(ValueError):
        NoiseParameter(1.5)
    with pytest.raises(ValueError):
        rho_ab(-0.1)
    assert is_entangled(0.5)
    assert not is_entangled(2.0 / 3.0)
    assert NoiseParameter(0.7).separable
    assert "separable" in rho_ab(2.0 / 3.0).flags
    assert "separable" not in rho_ab(0.6).flags


def test_source_state_is_a_density_operator():
    for eps in np.linspace(0.0, 1.0, 11):
        rho = rho_ab(eps)
        assert rho.trace == pytest.approx(1.0)
        assert rho.is_positive()


def test_reconstruction_of_exact_tables_is_identity():
    rng = np.random.default_rng(11)
    for _ in range(100):
        rho = _random_state(rng)
        rebuilt = reconstruct_state(born_table_ab(rho))
        np.testing.assert_allclose(rebuilt.matrix, rho.matrix, atol=1e-10)


def test_reconstruction_rejects_bad_tables():
    with pytest.raises(ValueError):
        reconstruct_state(JointTable(np.full((2, 2), 0.25), (("0", "1"),) * 2, ("a", "b")))


def test_reconstruction_from_sampled_counts():
    eps = 0.2
    exact = joint_probs_ab(eps)
    alice, bob = exact.sample(1_000_000, np.random.default_rng(2024))
    counts = np.zeros((4, 4))
    np.add.at(counts, (alice, bob), 1)
    observed = JointTable.from_counts(counts, exact.labels, exact.parties)
    report = reconstruction_report(observed, rho_ab(eps))
    assert report.max_deviation < 5e-3
    assert report.trace == pytest.approx(1.0, abs=1e-12)


def test_bob_pair_table():
    eps = 0.3
    table = bob_pair_table(eps)
    assert table.probs.sum() == pytest.approx(0.25)
    assert table.probs[0, 0] == pytest.approx(0.25 * (eps / 4) ** 2)
    assert table.probs[1, 2] == pytest.approx(0.25 * ((4 - eps) / 12) ** 2)
    np.testing.assert_allclose(table.probs, table.probs.T)


def test_binary_entropy():
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0


def test_empirical_mi_of_perfect_correlation():
    estimate = empirical_mi(np.array([[500, 0], [0, 500]]), bootstrap=50)
    assert estimate.bits == pytest.approx(1.0)
    assert estimate.n == 1000
    assert estimate.bias == pytest.approx(1.0 / (2000 * np.log(2.0)))


def test_empirical_mi_of_product_counts():
    rng = np.random.default_rng(3)
    x = rng.integers(0, 2, size=1_000_000)
    y = rng.integers(0, 4, size=1_000_000)
    counts = np.zeros((2, 4))
    np.add.at(counts, (x, y), 1)
    estimate = empirical_mi(counts, bootstrap=20, rng=rng)
    assert estimate.corrected < 5e-5
    assert estimate.stderr > 0.0


def test_empirical_mi_errors():
    with pytest.raises(ValueError):
        empirical_mi(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        empirical_mi(np.ones((2, 2, 2)))
    with pytest.raises(ValueError):
        empirical_mi(np.array([[1, -1], [0, 2]]))


def test_accessible_information_decreases_with_noise():
    values = [accessible_info_ab(float(e)) for e in np.linspace(0.0, 1.0, 1001)]
    assert np.all(np.diff(values) < 0)
