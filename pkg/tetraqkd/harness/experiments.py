"""Mode runners. Each returns named DataFrames; the runner layer writes them as CSV."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, TypeVar

import numpy as np
import pandas as pd
from rich.table import Table

from tetraqkd.channel.source import (
    SEPARABLE_NOISE,
    accessible_info_ab,
    joint_probs_ab,
    reconstruction_report,
    rho_ab,
)
from tetraqkd.config import ConfigError, EveConfig, ExperimentConfig
from tetraqkd.eve.measurement import (
    alice_eve_born_table,
    alice_eve_joint,
    alice_eve_mutual_information,
    eta,
    eve_povm4,
    eve_povm5,
    five_member_boundary,
    optimize_mu,
)
from tetraqkd.eve.purification import PurificationParams, eve_components, purification
from tetraqkd.harness.aggregate import aggregate_trials
from tetraqkd.harness.estimators import goodness_of_fit, z_score
from tetraqkd.harness.sampling import eve_povm_for, sample_table, triple_distribution
from tetraqkd.io.csvout import read_csv
from tetraqkd.io.logging import CONSOLE
from tetraqkd.keygen.analytic import (
    N_ASYMPTOTIC,
    i_ab_tail_bound,
    iteration_table,
)
from tetraqkd.keygen.protocol import run_sifting
from tetraqkd.qmath.checks import OPERATOR_TOL, max_abs, require_close
from tetraqkd.qmath.operators import partial_trace
from tetraqkd.qmath.tables import JointTable
from tetraqkd.qmath.tetrahedron import (
    expand_identity,
    povm_from_vectors,
    singlet_from_tetra,
    tetra_states,
    werner_identity_check,
)
from tetraqkd.rng import RNGManager
from tetraqkd.security.eavesdropper import MAX_EXACT_ITERATION, i_ae_n
from tetraqkd.security.yields import (
    SIX_STATE_REFERENCE_THRESHOLD,
    ThresholdNotBracketed,
    ck_yield,
    six_state_iab,
    six_state_threshold,
    threshold,
)

NAN = float("nan")
CONTRACT_POINTS = 9
SIMULATE_METRICS = ["eps_hat", "p_succ_hat", "p_err_hat", "i_ab_hat", "i_ae_hat"]

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class RunOutputs:
    frames: Dict[str, pd.DataFrame]
    summary: Dict[str, float] = field(default_factory=dict)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> List[R]:
    """Map in index order, on a process pool when ``workers > 1``."""
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(fn, items))
    return [fn(item) for item in items]


def _entangled_grid(cfg: ExperimentConfig) -> list[float]:
    values = [float(e) for e in cfg.eps_values()]
    kept = [e for e in values if e <= SEPARABLE_NOISE]
    if len(kept) < len(values):
        logging.warning("Skipping %d noise levels above 2/3", len(values) - len(kept))
    return kept


def verify_contracts(phi: float = 0.0) -> None:
    """Operator identities the rest of the package relies on; raises InvariantViolation."""
    states = tetra_states()
    require_close(expand_identity(states), np.eye(4), OPERATOR_TOL, "identity expansion")
    werner_identity_check(states)
    for l in range(4):
        singlet_from_tetra(states, l)
    povm_from_vectors()
    eve_povm4(phi)
    for eps in np.linspace(0.0, SEPARABLE_NOISE, CONTRACT_POINTS):
        eve_components(PurificationParams(float(eps), phi))
    logging.debug("Operator contracts hold for phi = %g", phi)


def analytic_row(item: tuple[ExperimentConfig, float]) -> dict[str, float]:
    cfg, eps = item
    n_max = cfg.analysis.n_max
    stats = iteration_table(eps, N_ASYMPTOTIC)
    row: dict[str, float] = {"eps": eps, "accessible_info": accessible_info_ab(eps)}
    for s in stats[:n_max]:
        row[f"i_ab_{s.n}"] = s.i_ab_n
    row["i_ab_total"] = sum(s.i_ab_n for s in stats[:n_max])
    row["i_ab_asymptotic"] = sum(s.i_ab_n for s in stats)
    row["i_ab_tail_bound"] = i_ab_tail_bound(eps, n_max)
    row["six_state_iab"] = six_state_iab(eps)
    row["gap"] = row["i_ab_total"] - row["six_state_iab"]
    entangled = eps <= SEPARABLE_NOISE
    row["eta"] = eta(eps) if entangled else NAN
    for k in cfg.analysis.n_max_values:
        report = ck_yield(eps, k) if entangled else None
        row[f"i_ae_total_n{k}"] = report.i_ae_total if report else NAN
        row[f"yield_n{k}"] = report.yield_ck if report else NAN
    return row


def run_analytic(cfg: ExperimentConfig) -> RunOutputs:
    eps_values = [float(e) for e in cfg.eps_values()]
    logging.info("Analytic sweep over %d noise levels", len(eps_values))
    rows = parallel_map(analytic_row, [(cfg, e) for e in eps_values], cfg.simulation.workers)
    frame = pd.DataFrame(rows)
    return RunOutputs({"analytic": frame}, {"points": float(len(frame))})


def _print_thresholds(title: str, rows: list[dict[str, float]]) -> None:
    table = Table(title=title)
    table.add_column("n_max", justify="right")
    table.add_column("threshold eps", justify="right")
    for row in rows:
        value = row["threshold"]
        table.add_row(str(row["n_max"]), "not bracketed" if np.isnan(value) else f"{value:.6f}")
    CONSOLE.print(table)


def run_threshold(cfg: ExperimentConfig) -> RunOutputs:
    rows = []
    for n_max in cfg.analysis.n_max_values:
        try:
            value = threshold(n_max, cfg.analysis.tol)
        except ThresholdNotBracketed as exc:
            logging.warning("%s", exc)
            value = NAN
        rows.append({"n_max": n_max, "threshold": value, "tol": cfg.analysis.tol})
    _print_thresholds("CK noise thresholds", rows)
    return RunOutputs({"threshold": pd.DataFrame(rows)})


def run_tomography(cfg: ExperimentConfig) -> RunOutputs:
    manager = RNGManager(cfg.seed)
    shots = cfg.analysis.shots
    entries, summary = [], []
    for idx, eps in enumerate(float(e) for e in cfg.eps_values()):
        exact = joint_probs_ab(eps)
        alice, bob = exact.sample(shots, manager.stream(idx))
        counts = np.zeros((4, 4), dtype=np.int64)
        np.add.at(counts, (alice, bob), 1)
        observed = JointTable.from_counts(counts, exact.labels, exact.parties)
        reference = rho_ab(eps)
        report = reconstruction_report(observed, reference)
        exact_report = reconstruction_report(exact, reference)
        for (i, j), value in np.ndenumerate(report.rho.matrix):
            exact_value = reference.matrix[i, j]
            entries.append(
                {
                    "eps": eps,
                    "row": i,
                    "col": j,
                    "re": value.real,
                    "im": value.imag,
                    "re_exact": exact_value.real,
                    "im_exact": exact_value.imag,
                }
            )
        summary.append(
            {
                "eps": eps,
                "shots": shots,
                "max_deviation": report.max_deviation,
                "exact_round_trip": exact_report.max_deviation,
                "min_eigenvalue": report.min_eigenvalue,
                "trace": report.trace,
                "physical": report.physical,
                "gof_pvalue": goodness_of_fit(counts, exact).pvalue,
            }
        )
        logging.info("Tomography eps = %.4f: max deviation %.2e", eps, report.max_deviation)
    return RunOutputs(
        {"tomography": pd.DataFrame(entries), "tomography_summary": pd.DataFrame(summary)}
    )


def _analytic_targets(eps: float, n: int, eve_povm: int) -> dict[str, float]:
    stats = iteration_table(eps, n)[-1]
    exact_eve = eve_povm == 4 and eps <= SEPARABLE_NOISE and n <= MAX_EXACT_ITERATION
    i_ae = i_ae_n(eps, n) if exact_eve else NAN
    return {
        "eps_n": stats.eps_n,
        "p_succ": stats.p_succ_n,
        "p_err": stats.p_err_n,
        "i_ab": stats.i_ab_n,
        "i_ae": i_ae,
    }


def simulate_trial(item: tuple[ExperimentConfig, float, int, int]) -> tuple[list[dict], list[dict]]:
    """One Monte Carlo trial: sample, sift, compare with the exact series."""
    cfg, eps, trial, stream = item
    rng = RNGManager(cfg.seed).stream(stream)
    povm = eve_povm_for(cfg.eve, eps)
    table = triple_distribution(eps, cfg.eve.phi, povm, cfg.eve.sampling)
    batch = sample_table(table, cfg.simulation.pairs, rng)
    gof = goodness_of_fit(batch.counts(), table)
    reports = run_sifting(
        batch.alice,
        batch.bob,
        cfg.simulation.max_iter,
        rng,
        eve_letters=batch.eve,
        eve_outcomes=len(povm),
        bootstrap=cfg.simulation.bootstrap,
        keep_transcripts=cfg.simulation.keep_transcripts,
    )
    rows, messages = [], []
    for report in reports:
        target = _analytic_targets(eps, report.n, len(povm))
        row = {"eps": eps, "trial": trial, **report.to_row()}
        row.update({f"{k}_exact": v for k, v in target.items()})
        # letters entering round n carry the noise of round n
        row["eps_hat_z"] = z_score(report.eps_hat, target["eps_n"], report.eps_hat_se)
        row["p_succ_z"] = z_score(report.p_succ_hat, target["p_succ"], report.p_succ_se)
        row["p_err_z"] = z_score(report.p_err_hat, target["p_err"], report.p_err_se)
        row["i_ab_z"] = z_score(report.i_ab_hat - report.i_ab_bias, target["i_ab"], report.i_ab_se)
        if not np.isnan(target["i_ae"]):
            corrected = report.i_ae_hat - report.i_ae_bias
            row["i_ae_z"] = z_score(corrected, target["i_ae"], report.i_ae_se)
        row["gof_pvalue"] = gof.pvalue
        rows.append(row)
        if report.transcript is not None:
            messages.extend(
                {"eps": eps, "trial": trial, "n": report.n, "seq": i, "message": text}
                for i, text in enumerate(report.transcript.to_messages())
            )
    return rows, messages


def run_simulate(cfg: ExperimentConfig) -> RunOutputs:
    eps_values = [float(e) for e in cfg.eps_values()]
    trials = cfg.simulation.trials
    items = [
        (cfg, eps, t, i * trials + t) for i, eps in enumerate(eps_values) for t in range(trials)
    ]
    logging.info(
        "Simulating %d trials of %d pairs (%d noise levels)",
        len(items),
        cfg.simulation.pairs,
        len(eps_values),
    )
    results = parallel_map(simulate_trial, items, cfg.simulation.workers)
    frame = pd.DataFrame([row for rows, _ in results for row in rows])
    frames = {"simulate": frame}
    if not frame.empty:
        metrics = [c for c in SIMULATE_METRICS if c in frame.columns]
        frames["simulate_summary"] = aggregate_trials(frame, metrics)
    if cfg.simulation.keep_transcripts:
        frames["transcripts"] = pd.DataFrame([m for _, messages in results for m in messages])
    return RunOutputs(frames, {"trials": float(len(items))})


def povm_row(item: tuple[float, EveConfig]) -> dict[str, float]:
    eps, eve = item
    phi = eve.phi
    povm = eve_povm4(phi)
    born = alice_eve_born_table(eps, phi, povm)
    row = {
        "eps": eps,
        "eta": eta(eps),
        "completeness_error": max_abs(povm.stack().sum(axis=0) - np.eye(4)),
        "max_rank": max(povm.ranks()),
        "tetra_form_deviation": max_abs(born.probs - alice_eve_joint(eps).probs),
        "i4": alice_eve_mutual_information(eps, phi, povm),
        "purification_error": purification_marginal_error(eps, phi),
        "mu": 0.0,
        "gain": 0.0,
        "relative_gain": 0.0,
    }
    if eve.mu != "optimal":
        # fixed mu: the gain may be negative
        mu = float(eve.mu)
        gain = alice_eve_mutual_information(eps, phi, eve_povm5(phi, mu)) - row["i4"]
        relative = gain / row["i4"] if row["i4"] > 0 else 0.0
        row.update(mu=mu, gain=gain, relative_gain=relative)
    elif 0.0 < eps < SEPARABLE_NOISE:
        best = optimize_mu(eps, phi)
        row.update(mu=best.mu, gain=best.gain, relative_gain=best.relative_gain)
    return row


def run_povm_check(cfg: ExperimentConfig) -> RunOutputs:
    phi = cfg.eve.phi
    items = [(e, cfg.eve) for e in _entangled_grid(cfg)]
    rows = parallel_map(povm_row, items, cfg.simulation.workers)
    frame = pd.DataFrame(rows)
    boundary = five_member_boundary(phi)
    max_relative = float(frame["relative_gain"].max()) if not frame.empty else 0.0
    max_gain = float(frame["gain"].max()) if not frame.empty else 0.0

    table = Table(title="Eve POVM checks")
    table.add_column("check")
    table.add_column("value", justify="right")
    if not frame.empty:
        table.add_row("max completeness error", f"{frame['completeness_error'].max():.2e}")
        deviation = frame["tetra_form_deviation"].max()
        table.add_row("max tetrahedron-form deviation", f"{deviation:.2e}")
    table.add_row("five-member boundary eps", f"{boundary:.4f}")
    table.add_row("max gain (bits)", f"{max_gain:.2e}")
    table.add_row("max gain / I4", f"{max_relative:.3%}")
    CONSOLE.print(table)
    summary = pd.DataFrame(
        [
            {
                "phi": phi,
                "mu_policy": str(cfg.eve.mu),
                "boundary_eps": boundary,
                "max_gain": max_gain,
                "max_relative_gain": max_relative,
            }
        ]
    )
    return RunOutputs({"povm_check": frame, "povm_boundary": summary}, {"boundary": boundary})


def _load_overlay(path: str) -> pd.DataFrame:
    try:
        overlay = read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ConfigError(f"cannot read 6-state overlay {path}: {exc}") from exc
    missing = {"eps", "i_ae"} - set(overlay.columns)
    if missing:
        raise ConfigError(f"overlay {path} is missing columns {sorted(missing)}")
    return overlay.sort_values("eps")


def run_compare(cfg: ExperimentConfig) -> RunOutputs:
    n_max = cfg.analysis.n_max
    overlay_path = cfg.output.overlay_sixstate_eve
    overlay = _load_overlay(overlay_path) if overlay_path else None
    rows = []
    for eps in _entangled_grid(cfg):
        report = ck_yield(eps, n_max)
        six = six_state_iab(eps)
        row = {
            "eps": eps,
            "i_ab_singapore": report.i_ab_total,
            "i_ab_sixstate": six,
            "gap": report.i_ab_total - six,
            "relative_gap": (report.i_ab_total - six) / six if six > 0 else NAN,
            "yield_singapore": report.yield_ck,
        }
        if overlay is not None:
            i_ae = float(np.interp(eps, overlay["eps"], overlay["i_ae"]))
            row.update(i_ae_sixstate=i_ae, yield_sixstate=six - i_ae)
        rows.append(row)

    summary = {
        "n_max": float(n_max),
        "threshold_singapore": NAN,
        "threshold_sixstate": NAN,
        "threshold_sixstate_reference": SIX_STATE_REFERENCE_THRESHOLD,
        "improvement_over_reference": NAN,
        "improvement_over_overlay": NAN,
    }
    try:
        summary["threshold_singapore"] = threshold(n_max, cfg.analysis.tol)
    except ThresholdNotBracketed as exc:
        logging.warning("%s", exc)
    if overlay is not None:
        try:
            summary["threshold_sixstate"] = six_state_threshold(overlay)
        except ThresholdNotBracketed as exc:
            logging.warning("%s", exc)
    # relative increase of the tolerable noise; NaN propagates from a missing threshold
    ours = summary["threshold_singapore"]
    summary["improvement_over_reference"] = ours / SIX_STATE_REFERENCE_THRESHOLD - 1.0
    summary["improvement_over_overlay"] = ours / summary["threshold_sixstate"] - 1.0
    return RunOutputs(
        {"compare": pd.DataFrame(rows), "compare_summary": pd.DataFrame([summary])}, summary
    )


def purification_marginal_error(eps: float, phi: float = 0.0) -> float:
    """Largest entry of tr_Eve|S⟩⟨S| − ρ_AB, for diagnostics."""
    reduced = partial_trace(purification(PurificationParams(eps, phi)).projector(), (0, 1))
    return max_abs(reduced.matrix - rho_ab(eps).matrix)


RUNNERS: Dict[str, Callable[[ExperimentConfig], RunOutputs]] = {
    "analytic": run_analytic,
    "simulate": run_simulate,
    "threshold": run_threshold,
    "tomography": run_tomography,
    "povm-check": run_povm_check,
    "compare": run_compare,
}


def run_mode(cfg: ExperimentConfig) -> RunOutputs:
    verify_contracts(cfg.eve.phi)
    outputs = RUNNERS[cfg.mode](cfg)
    for name, frame in outputs.frames.items():
        if frame.isin([np.inf, -np.inf]).to_numpy().any():
            logging.warning("Frame %s contains infinite values", name)
    return outputs


__all__ = [
    "RUNNERS",
    "RunOutputs",
    "parallel_map",
    "purification_marginal_error",
    "run_mode",
    "verify_contracts",
]
