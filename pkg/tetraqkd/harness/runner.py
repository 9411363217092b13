from __future__ import annotations

import logging
from pathlib import Path

from tetraqkd.config import ConfigError, ExperimentConfig, dump_config
from tetraqkd.harness.experiments import RunOutputs, run_mode
from tetraqkd.io.csvout import csv_header, write_csv, write_run_metadata
from tetraqkd.qmath.checks import InvariantViolation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def write_outputs(cfg: ExperimentConfig, outputs: RunOutputs, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out_dir / "config_resolved.yaml")
    header = csv_header(cfg)
    paths = [
        write_csv(frame, out_dir / f"{name}.csv", header) for name, frame in outputs.frames.items()
    ]
    paths.append(write_run_metadata(cfg, out_dir))
    return paths


def run(cfg: ExperimentConfig) -> int:
    """Run one mode and write its outputs; returns the process exit code."""
    try:
        outputs = run_mode(cfg)
    except ConfigError as exc:
        logging.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        logging.error("Numerical invariant violated, aborting: %s", exc)
        return EXIT_INVARIANT
    out_dir = cfg.out_dir()
    write_outputs(cfg, outputs, out_dir)
    for key, value in outputs.summary.items():
        logging.info("%s = %.6g", key, value)
    logging.info("Outputs in %s", out_dir)
    return EXIT_OK
