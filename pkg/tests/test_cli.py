from pathlib import Path

import pytest
import yaml

from tetraqkd.cli import main, parse_args, resolve_config
from tetraqkd.io.csvout import read_csv


def _exit_code(argv) -> int:
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


def test_analytic_run(tmp_path):
    assert _exit_code(["analytic", "--eps", "0.1", "--n-max", "3", "--out", str(tmp_path)]) == 0
    frame = read_csv(tmp_path / "analytic.csv")
    assert frame["eps"].tolist() == [0.1]
    assert "i_ab_3" in frame.columns


def test_dump_config(capsys):
    assert _exit_code(["simulate", "--config", "configs/flat_simulate.yaml", "--dump-config"]) == 0
    dumped = yaml.safe_load(capsys.readouterr().out)
    assert dumped["mode"] == "simulate"
    assert dumped["simulation"]["pairs"] == 200_000


def test_flags_override_config():
    args = parse_args(
        ["simulate", "--config", "configs/flat_simulate.yaml", "--pairs", "50", "--eve-povm", "5"]
    )
    cfg = resolve_config(args)
    assert cfg.simulation.pairs == 50
    assert cfg.eve.povm == 5
    assert cfg.seed == 7


def test_grid_flag_replaces_single_noise_level():
    args = parse_args(
        ["simulate", "--config", "configs/flat_simulate.yaml", "--eps-grid", "0:0.2:0.1"]
    )
    cfg = resolve_config(args)
    assert cfg.eps is None
    assert len(cfg.eps_values()) == 3


def test_subcommand_sets_mode():
    cfg = resolve_config(parse_args(["threshold", "--config", "configs/analytic.yaml"]))
    assert cfg.mode == "threshold"


def test_config_errors_exit_with_code_two(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("grid:\n  step: -1\n")
    assert _exit_code(["analytic", "--config", str(bad)]) == 2
    assert _exit_code(["analytic", "--eps", "1.5"]) == 2
    assert _exit_code(["simulate", "--eps", "0.1", "--pairs", "1"]) == 2


def test_help_lists_csv_schema(capsys):
    assert _exit_code(["compare", "--help"]) == 0
    assert "compare_summary.csv" in capsys.readouterr().out
