from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, Sequence

from tetraqkd.config import (
    MODES,
    ConfigError,
    ExperimentConfig,
    build_config,
    deep_merge,
    dump_config,
    load_raw,
    route_flat_keys,
)
from tetraqkd.harness.runner import EXIT_CONFIG, EXIT_OK, run
from tetraqkd.io.logging import setup_logging

MODE_HELP: Dict[str, tuple[str, str]] = {
    "analytic": (
        "Exact I_AB series, accessible information, 6-state comparison and CK yields over eps",
        "analytic.csv: eps, accessible_info, i_ab_1..i_ab_<n_max>, i_ab_total, i_ab_asymptotic,\n"
        "  i_ab_tail_bound, six_state_iab, gap, eta, i_ae_total_n<k>, yield_n<k> per n_max_values",
    ),
    "simulate": (
        "Monte Carlo sampling and iterative sifting, checked against the exact series",
        "simulate.csv: eps, trial, n, transmitted, letters_in, keyed, recycled, discarded,\n"
        "  pairs_spent, pairs_carried, bits, errors, eps_hat[_se], p_succ_hat, p_succ_se,\n"
        "  p_err_hat, p_err_se, i_ab_hat, i_ab_se, i_ab_bias, i_ae_hat, i_ae_se, i_ae_bias,\n"
        "  <name>_exact and <name>_z comparators, gof_pvalue\n"
        "simulate_summary.csv: eps, n, <metric>_mean, <metric>_std, <metric>_ci95, trials\n"
        "transcripts.csv (with keep_transcripts): eps, trial, n, seq, message",
    ),
    "threshold": (
        "Noise level where the CK yield crosses zero, per series truncation",
        "threshold.csv: n_max, threshold, tol",
    ),
    "tomography": (
        "Reconstruct rho_AB from sampled tetrahedron statistics",
        "tomography.csv: eps, row, col, re, im, re_exact, im_exact\n"
        "tomography_summary.csv: eps, shots, max_deviation, exact_round_trip, min_eigenvalue,\n"
        "  trace, physical, gof_pvalue",
    ),
    "povm-check": (
        "Eve's measurement: completeness, eta, I_4, optimal five-member gain and its boundary",
        "povm_check.csv: eps, eta, completeness_error, max_rank, tetra_form_deviation, i4,\n"
        "  purification_error, mu, gain, relative_gain\n"
        "povm_boundary.csv: phi, mu_policy, boundary_eps, max_gain, max_relative_gain",
    ),
    "compare": (
        "Singapore versus 6-state key rates, with an optional external 6-state Eve curve",
        "compare.csv: eps, i_ab_singapore, i_ab_sixstate, gap, relative_gap, yield_singapore,\n"
        "  i_ae_sixstate, yield_sixstate (overlay only)\n"
        "compare_summary.csv: n_max, threshold_singapore, threshold_sixstate,\n"
        "  threshold_sixstate_reference, improvement_over_reference, improvement_over_overlay",
    ),
}

# argparse destination -> config key understood by route_flat_keys
OVERRIDE_KEYS = {
    "eps": "eps",
    "pairs": "pairs",
    "max_iter": "max_iter",
    "n_max": "n_max",
    "trials": "trials",
    "workers": "workers",
    "seed": "seed",
    "phi": "phi",
    "eve_povm": "povm",
    "eve_sampling": "sampling",
    "out": "out_dir",
    "overlay_sixstate_eve": "overlay_sixstate_eve",
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Path to config YAML")
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("--eps", type=float, default=None, help="Single noise level")
    noise.add_argument("--eps-grid", default=None, metavar="A:B:STEP", help="Noise grid")
    common.add_argument("--pairs", type=int, default=None, help="Transmitted pairs per trial")
    common.add_argument("--max-iter", type=int, default=None, help="Sifting rounds to simulate")
    common.add_argument("--n-max", type=int, default=None, help="Series truncation")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--phi", type=float, default=None, help="Purification phase")
    common.add_argument("--eve-povm", type=int, choices=[4, 5], default=None)
    common.add_argument("--eve-sampling", choices=["channel", "purification"], default=None)
    common.add_argument("--out", default=None, help="Output directory")
    common.add_argument("--overlay-sixstate-eve", default=None, metavar="CSV")
    common.add_argument(
        "--dump-config", action="store_true", help="Print the resolved config and exit"
    )
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tetraqkd", description="Tetrahedron-state QKD analysis and simulation"
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    common = _common_parser()
    for mode in MODES:
        summary, schema = MODE_HELP[mode]
        sub.add_parser(
            mode,
            parents=[common],
            help=summary,
            description=summary,
            epilog=f"CSV outputs:\n{schema}",
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """CLI flags over the config file over model defaults."""
    data: Dict[str, Any] = load_raw(args.config) if args.config else {}
    overrides: Dict[str, Any] = {"mode": args.mode}
    for dest, key in OVERRIDE_KEYS.items():
        value = getattr(args, dest)
        if value is not None:
            overrides[key] = value
    try:
        data = deep_merge(data, route_flat_keys(overrides))
        if args.eps_grid is not None:
            data = deep_merge(data, route_flat_keys({"eps_grid": args.eps_grid}))
            data["eps"] = None
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return build_config(data)


def main(argv: Sequence[str] | None = None) -> None:
    args = parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO, verbose=args.verbose)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        logging.error("Configuration error: %s", exc)
        raise SystemExit(EXIT_CONFIG) from None
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        raise SystemExit(EXIT_OK)
    raise SystemExit(run(cfg))
