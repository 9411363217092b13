from pathlib import Path

import pytest

from tetraqkd.config import build_config
from tetraqkd.harness import EXIT_OK, run
from tetraqkd.io.csvout import csv_body, read_csv


def _run(tmp_path: Path, name: str, **data) -> Path:
    out = tmp_path / name
    cfg = build_config({**data, "out_dir": str(out)})
    assert run(cfg) == EXIT_OK
    return out


def test_reproducibility(tmp_path: Path):
    settings = dict(mode="simulate", eps_grid="0.1:0.3:0.2", pairs=2000, max_iter=2, seed=99)
    out1 = _run(tmp_path, "run1", **settings)
    out2 = _run(tmp_path, "run2", **settings)
    assert csv_body(out1 / "simulate.csv") == csv_body(out2 / "simulate.csv")
    assert read_csv(out1 / "simulate.csv")["eps"].nunique() == 2


@pytest.mark.slow
def test_parallel_run_matches_serial(tmp_path: Path):
    settings = dict(mode="simulate", eps=0.2, pairs=2000, max_iter=2, trials=3, seed=5)
    serial = _run(tmp_path, "serial", workers=1, **settings)
    parallel = _run(tmp_path, "parallel", workers=2, **settings)
    assert csv_body(serial / "simulate.csv") == csv_body(parallel / "simulate.csv")


def test_run_writes_header_and_metadata(tmp_path: Path):
    out = _run(tmp_path, "analytic", eps=0.1, seed=3)
    text = (out / "analytic.csv").read_text()
    assert text.startswith("# tool: tetraqkd")
    assert "# seed: 3" in text
    assert (out / "config_resolved.yaml").exists()
    assert (out / "run_metadata.json").exists()
