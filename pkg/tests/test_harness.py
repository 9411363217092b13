import numpy as np
import pandas as pd
import pytest

from tetraqkd.channel.source import joint_probs_ab
from tetraqkd.config import ConfigError, build_config
from tetraqkd.eve.measurement import (
    FIFTH_LABEL,
    alice_eve_born_table,
    alice_eve_mutual_information,
    eve_povm5,
)
from tetraqkd.harness import run_mode, sample_run, triple_distribution, verify_contracts
from tetraqkd.harness.aggregate import aggregate_trials
from tetraqkd.harness.estimators import goodness_of_fit, z_score
from tetraqkd.harness.sampling import sample_table
from tetraqkd.rng import RNGManager


def _cfg(**data):
    return build_config(data)


@pytest.mark.parametrize("model", ["channel", "purification"])
@pytest.mark.parametrize("eps", [0.0, 0.25, 0.6])
def test_triple_distribution_marginals(model, eps):
    table = triple_distribution(eps, phi=0.3, model=model)
    assert table.shape == (4, 4, 4)
    np.testing.assert_allclose(
        table.marginal(["alice", "bob"]).probs, joint_probs_ab(eps).probs, atol=1e-10
    )
    np.testing.assert_allclose(
        table.marginal(["alice", "eve"]).probs,
        alice_eve_born_table(eps, 0.3).probs,
        atol=1e-10,
    )


def test_eve_is_independent_without_noise():
    for model in ("channel", "purification"):
        table = triple_distribution(0.0, model=model)
        expected = np.broadcast_to(joint_probs_ab(0.0).probs[:, :, None] * 0.25, table.shape)
        np.testing.assert_allclose(table.probs, expected, atol=1e-10)


def test_triple_distribution_with_five_outcomes():
    table = triple_distribution(0.1, eve_povm=eve_povm5(0.0, 0.2))
    assert table.shape == (4, 4, 5)
    assert table.labels[2][-1] == FIFTH_LABEL


def test_unknown_sampling_model():
    with pytest.raises(ValueError):
        triple_distribution(0.1, model="coherent")


def test_sample_run_shapes_and_records():
    cfg = _cfg(eps=0.2, pairs=500, seed=3)
    batch = sample_run(cfg, RNGManager(cfg.seed).stream(0))
    assert len(batch) == 500
    assert batch.counts().sum() == 500
    frame = batch.to_frame()
    assert list(frame.columns) == ["index", "alice", "bob", "eve"]
    assert batch.records()[0].alice in "ABCD"


def test_sample_run_with_no_pairs():
    cfg = _cfg(eps=0.2, pairs=0)
    assert len(sample_run(cfg, np.random.default_rng(0))) == 0
    with pytest.raises(ValueError):
        sample_run(_cfg(pairs=10), np.random.default_rng(0))


def test_sampled_counts_fit_the_exact_table():
    table = triple_distribution(0.3)
    batch = sample_table(table, 200_000, np.random.default_rng(21))
    gof = goodness_of_fit(batch.counts(), table)
    assert gof.dof == 63
    assert gof.pvalue > 1e-4


def test_goodness_of_fit_flags_impossible_cells():
    table = triple_distribution(0.0)
    counts = np.zeros(table.shape)
    counts[0, 0, 0] = 5
    assert goodness_of_fit(counts, table).pvalue == 0.0


def test_z_score_with_zero_error():
    assert z_score(0.0, 0.0, 0.0) == 0.0
    assert z_score(0.1, 0.0, 0.0) == float("inf")
    assert z_score(1.2, 1.0, 0.1) == pytest.approx(2.0)


def test_streams_do_not_depend_on_order():
    first = RNGManager(5).stream(3).random(4)
    again = RNGManager(5).stream(3).random(4)
    other = RNGManager(5).stream(4).random(4)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)
    assert RNGManager(5).numpy.random() == RNGManager(5).numpy.random()


def test_verify_contracts():
    verify_contracts()
    verify_contracts(phi=1.3)


@pytest.mark.slow
def test_simulation_matches_exact_series():
    cfg = _cfg(
        mode="simulate",
        eps_grid="0:0.4:0.1",
        pairs=400_000,
        max_iter=2,
        bootstrap=50,
        seed=11,
    )
    outputs = run_mode(cfg)
    frame = outputs.frames["simulate"]
    assert set(frame["eps"].round(6)) == {0.0, 0.1, 0.2, 0.3, 0.4}
    assert set(frame["n"]) == {1, 2}
    for col in ("eps_hat_z", "p_succ_z", "p_err_z", "i_ab_z", "i_ae_z"):
        assert frame[col].abs().max() < 4.0, col
    assert frame["i_ae_z"].notna().all()
    summary = outputs.frames["simulate_summary"]
    assert {"p_succ_hat_mean", "p_succ_hat_ci95", "trials"} <= set(summary.columns)


def test_simulation_keeps_transcripts():
    cfg = _cfg(mode="simulate", eps=0.1, pairs=400, max_iter=2, keep_transcripts=True)
    transcripts = run_mode(cfg).frames["transcripts"]
    assert list(transcripts.columns) == ["eps", "trial", "n", "seq", "message"]
    assert transcripts["message"].str.startswith(("alice:", "bob:")).all()


def test_aggregate_trials():
    frame = pd.DataFrame(
        {"eps": [0.1] * 4, "n": [1, 1, 2, 2], "trial": [0, 1, 0, 1], "x": [1.0, 3.0, 2.0, 2.0]}
    )
    agg = aggregate_trials(frame, ["x"]).set_index("n")
    assert agg.loc[1, "x_mean"] == 2.0
    assert agg.loc[2, "x_std"] == 0.0
    assert agg.loc[1, "trials"] == 2


def test_analytic_mode_columns():
    cfg = _cfg(eps_grid="0:0.8:0.4", n_max=3, n_max_values=[1, 3])
    frame = run_mode(cfg).frames["analytic"]
    assert len(frame) == 3
    assert {"i_ab_1", "i_ab_3", "i_ab_asymptotic", "yield_n1", "yield_n3"} <= set(frame.columns)
    assert "i_ab_4" not in frame.columns
    assert frame["i_ab_1"].iloc[0] == pytest.approx(1.0 / 3.0)
    # 0.8 lies beyond the separable point: no Eve quantities
    assert np.isnan(frame["yield_n3"].iloc[2])
    assert frame["i_ab_total"].iloc[2] > 0


@pytest.mark.slow
def test_threshold_mode():
    cfg = _cfg(mode="threshold", n_max_values=[1])
    frame = run_mode(cfg).frames["threshold"]
    assert frame["threshold"].iloc[0] == pytest.approx(0.409, abs=0.002)


def test_tomography_mode():
    cfg = _cfg(mode="tomography", eps=0.3, shots=200_000, seed=2)
    outputs = run_mode(cfg)
    assert len(outputs.frames["tomography"]) == 16
    summary = outputs.frames["tomography_summary"].iloc[0]
    assert summary["exact_round_trip"] < 1e-10
    assert summary["max_deviation"] < 0.02
    assert summary["trace"] == pytest.approx(1.0)


def test_povm_check_mode():
    cfg = _cfg(mode="povm-check", eps_grid="0:0.9:0.3")
    outputs = run_mode(cfg)
    frame = outputs.frames["povm_check"]
    # 0.9 is dropped as separable
    assert len(frame) == 3
    assert frame["completeness_error"].max() < 1e-10
    assert frame["max_rank"].max() == 1
    assert frame["relative_gain"].max() < 0.01
    assert outputs.summary["boundary"] == pytest.approx(0.1725, abs=0.005)
    boundary = outputs.frames["povm_boundary"]
    assert list(boundary.columns) == [
        "phi",
        "mu_policy",
        "boundary_eps",
        "max_gain",
        "max_relative_gain",
    ]
    assert boundary["mu_policy"].iloc[0] == "optimal"
    assert boundary["max_gain"].iloc[0] == pytest.approx(frame["gain"].max())


def test_povm_check_with_fixed_mu():
    cfg = _cfg(mode="povm-check", eps_grid="0.05:0.1:0.05", mu=0.1)
    frame = run_mode(cfg).frames["povm_check"]
    assert len(frame) == 2
    assert (frame["mu"] == 0.1).all()
    for _, row in frame.iterrows():
        i5 = alice_eve_mutual_information(row["eps"], 0.0, eve_povm5(0.0, 0.1))
        assert row["gain"] == pytest.approx(i5 - row["i4"], abs=1e-12)


@pytest.mark.slow
def test_compare_mode_with_overlay(tmp_path):
    overlay = tmp_path / "sixstate.csv"
    pd.DataFrame({"eps": np.linspace(0.0, 0.6, 13), "i_ae": np.linspace(0.0, 0.3, 13)}).to_csv(
        overlay, index=False
    )
    cfg = _cfg(
        mode="compare", eps_grid="0:0.6:0.3", n_max=3, overlay_sixstate_eve=str(overlay)
    )
    outputs = run_mode(cfg)
    frame = outputs.frames["compare"]
    assert {"i_ae_sixstate", "yield_sixstate"} <= set(frame.columns)
    assert frame["gap"].iloc[0] == pytest.approx(0.066, abs=1e-3)
    assert 0.0 < outputs.summary["threshold_sixstate"] < 0.6
    summary = outputs.summary
    assert summary["threshold_singapore"] == pytest.approx(0.417, abs=0.002)
    assert summary["threshold_sixstate_reference"] == 0.236
    assert summary["improvement_over_reference"] == pytest.approx(0.767, abs=0.01)
    assert np.isfinite(summary["improvement_over_overlay"])


def test_compare_mode_rejects_bad_overlay(tmp_path):
    overlay = tmp_path / "bad.csv"
    pd.DataFrame({"eps": [0.0, 0.5]}).to_csv(overlay, index=False)
    cfg = _cfg(mode="compare", eps=0.1, overlay_sixstate_eve=str(overlay))
    with pytest.raises(ConfigError):
        run_mode(cfg)
