from pathlib import Path

import numpy as np
import pytest
import yaml

from tetraqkd.config import (
    OUTPUT_ENV,
    ConfigError,
    ExperimentConfig,
    GridConfig,
    build_config,
    dump_config,
    load_config,
)


def test_load_config():
    cfg = load_config(Path("configs/analytic.yaml"))
    assert cfg.mode == "analytic"
    assert cfg.seed == 20240917
    assert cfg.analysis.n_max_values == [1, 3, 4, 5]
    assert len(cfg.eps_values()) == 201
    assert cfg.eps_values()[-1] == pytest.approx(2.0 / 3.0)


def test_flat_keys_are_routed():
    cfg = load_config(Path("configs/flat_simulate.yaml"))
    assert cfg.mode == "simulate"
    assert cfg.eps == 0.2
    assert cfg.simulation.pairs == 200_000
    assert cfg.simulation.max_iter == 2
    assert cfg.seed == 7


def test_grid_string_over_base():
    cfg = load_config(Path("configs/simulate.yaml"))
    np.testing.assert_allclose(cfg.eps_values(), [0.0, 0.2, 0.4])
    assert cfg.simulation.workers == 4
    assert cfg.eve.sampling == "channel"


def test_grid_parse_errors():
    with pytest.raises(ValueError):
        GridConfig.parse("0:1")
    with pytest.raises(ConfigError):
        build_config({"eps_grid": "0:0.5:-0.1"})


@pytest.mark.parametrize(
    "data",
    [
        {"unknown": 1},
        {"eps": 1.5},
        {"n_max_values": [7]},
        {"n_max_values": []},
        {"mode": "simulate", "pairs": 1},
        {"povm": 6},
        {"mu": 0.9},
        {"mode": "coherent"},
    ],
)
def test_invalid_config(data):
    with pytest.raises(ConfigError):
        build_config(data)


def test_unreadable_config(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_dump_config_reloads(tmp_path):
    cfg = load_config(Path("configs/povm_check.yaml"))
    text = dump_config(cfg, tmp_path / "resolved.yaml")
    assert (tmp_path / "resolved.yaml").read_text() == text
    assert build_config(yaml.safe_load(text)) == cfg


def test_output_directory(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    assert ExperimentConfig(mode="threshold").out_dir() == tmp_path / "threshold"
    assert build_config({"out_dir": "elsewhere"}).out_dir() == Path("elsewhere")
