from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict

import pandas as pd

from tetraqkd.config import ExperimentConfig
from tetraqkd.io.metadata import build_run_metadata, config_hash, tool_version

FLOAT_FORMAT = "%.12g"


def csv_header(cfg: ExperimentConfig) -> Dict[str, str]:
    return {
        "tool": f"tetraqkd {tool_version()}",
        "mode": cfg.mode,
        "seed": str(cfg.seed),
        "config_hash": config_hash(cfg),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_csv(frame: pd.DataFrame, path: Path, header: Dict[str, str]) -> Path:
    """CSV body preceded by ``# key: value`` lines; the body depends only on ``frame``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for key, value in header.items():
            fh.write(f"# {key}: {value}\n")
        frame.to_csv(fh, index=False, float_format=FLOAT_FORMAT)
    logging.info("Wrote %s (%d rows)", path, len(frame))
    return path


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def csv_body(path: str | Path) -> str:
    lines = Path(path).read_text().splitlines(keepends=True)
    return "".join(line for line in lines if not line.startswith("#"))


def write_run_metadata(cfg: ExperimentConfig, out_dir: Path) -> Path:
    path = out_dir / "run_metadata.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(build_run_metadata(cfg), indent=2))
    return path
