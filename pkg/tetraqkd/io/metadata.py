from __future__ import annotations

import hashlib
import json
import platform
import subprocess
import sys
from importlib import metadata
from typing import Dict

from tetraqkd.config import ExperimentConfig

TOOL_NAME = "tetraqkd"


def _pkg_version(name: str) -> str:
    try:
        return metadata.version(name)
    except metadata.PackageNotFoundError:
        return "unknown"


def tool_version() -> str:
    return _pkg_version(TOOL_NAME)


def config_hash(cfg: ExperimentConfig) -> str:
    """First 16 hex digits of sha256 over the canonical JSON dump."""
    canonical = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def build_run_metadata(cfg: ExperimentConfig) -> Dict[str, str]:
    try:
        git_hash = subprocess.check_output(
            ["git", "rev-parse", "HEAD"],
            text=True,
            stderr=subprocess.DEVNULL,
        ).strip()
    except Exception:
        git_hash = "unknown"
    return {
        "python_version": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy_version": _pkg_version("numpy"),
        "scipy_version": _pkg_version("scipy"),
        "pandas_version": _pkg_version("pandas"),
        "tetraqkd_version": tool_version(),
        "git_commit": git_hash,
        "mode": cfg.mode,
        "seed": str(cfg.seed),
        "config_hash": config_hash(cfg),
    }
