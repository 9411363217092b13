from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, get_args

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

Mode = Literal["analytic", "simulate", "threshold", "tomography", "povm-check", "compare"]
MODES: tuple[str, ...] = get_args(Mode)

OUTPUT_ENV = "TETRAQKD_OUTPUT_DIR"

# Flat keys accepted at the top level of a config file and routed to their section.
FLAT_KEYS: Dict[str, str] = {
    "pairs": "simulation",
    "max_iter": "simulation",
    "trials": "simulation",
    "workers": "simulation",
    "bootstrap": "simulation",
    "keep_transcripts": "simulation",
    "phi": "eve",
    "povm": "eve",
    "mu": "eve",
    "sampling": "eve",
    "n_max": "analysis",
    "n_max_values": "analysis",
    "tol": "analysis",
    "shots": "analysis",
    "out_dir": "output",
    "overlay_sixstate_eve": "output",
}


class ConfigError(Exception):
    pass


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    start: float = 0.0
    stop: float = 2.0 / 3.0
    step: float = 1.0 / 300.0

    @model_validator(mode="after")
    def check_range(self) -> "GridConfig":
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if not 0.0 <= self.start <= self.stop <= 1.0:
            raise ValueError("grid needs 0 <= start <= stop <= 1")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridConfig":
        """Parse ``START:STOP:STEP``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected START:STOP:STEP, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        return cls(start=start, stop=stop, step=step)

    def values(self) -> np.ndarray:
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.minimum(self.start + self.step * np.arange(count), self.stop)


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    pairs: int = Field(1_000_000, ge=0)
    max_iter: int = Field(3, ge=1)
    trials: int = Field(1, ge=1)
    workers: int = Field(1, ge=1)
    bootstrap: int = Field(200, ge=0)
    keep_transcripts: bool = False


class EveConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    phi: float = 0.0
    povm: Literal[4, 5] = 4
    # only read with the 5-member POVM; "optimal" runs the μ search per ε
    mu: Literal["optimal"] | float = "optimal"
    sampling: Literal["channel", "purification"] = "channel"

    @model_validator(mode="after")
    def check_mu(self) -> "EveConfig":
        if not isinstance(self.mu, str) and not 0.0 <= self.mu <= 0.5:
            raise ValueError("mu must be 'optimal' or a number in [0, 0.5]")
        return self


class AnalysisConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n_max: int = Field(5, ge=1, le=6)
    n_max_values: List[int] = Field(default_factory=lambda: [1, 3, 4, 5])
    tol: float = Field(1e-6, gt=0)
    shots: int = Field(1_000_000, ge=1)

    @field_validator("n_max_values")
    @classmethod
    def check_n_max_values(cls, values: List[int]) -> List[int]:
        if not values or any(not 1 <= v <= 6 for v in values):
            raise ValueError("n_max_values must be a non-empty list of integers in 1..6")
        return values


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    out_dir: str | None = None
    overlay_sixstate_eve: str | None = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    mode: Mode = "analytic"
    eps: float | None = None
    grid: GridConfig = GridConfig()
    seed: int = 0
    simulation: SimulationConfig = SimulationConfig()
    eve: EveConfig = EveConfig()
    analysis: AnalysisConfig = AnalysisConfig()
    output: OutputConfig = OutputConfig()

    @model_validator(mode="after")
    def check_mode(self) -> "ExperimentConfig":
        if self.eps is not None and not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps {self.eps} outside [0, 1]")
        if self.mode == "simulate" and self.simulation.pairs < 2:
            raise ValueError("simulate mode needs at least 2 pairs")
        return self

    def eps_values(self) -> np.ndarray:
        if self.eps is not None:
            return np.array([self.eps])
        return self.grid.values()

    def out_dir(self) -> Path:
        if self.output.out_dir:
            return Path(self.output.out_dir)
        return Path(os.environ.get(OUTPUT_ENV, "runs")) / self.mode


def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def route_flat_keys(data: Dict[str, Any]) -> Dict[str, Any]:
    routed: Dict[str, Any] = {}
    for key, value in data.items():
        if key in FLAT_KEYS:
            routed = deep_merge(routed, {FLAT_KEYS[key]: {key: value}})
        elif key == "eps_grid" and isinstance(value, str):
            routed = deep_merge(routed, {"grid": GridConfig.parse(value).model_dump()})
        else:
            routed = deep_merge(routed, {key: value})
    return routed


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return data


def load_raw(path: str | Path) -> Dict[str, Any]:
    """Read a config file, resolve its ``base:`` chain and route flat keys."""
    path = Path(path)
    data = _read_yaml(path)
    base_path = data.pop("base", None)
    try:
        routed = route_flat_keys(data)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if base_path:
        routed = deep_merge(load_raw(path.parent / base_path), routed)
    return routed


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(route_flat_keys(data))
    except (ValidationError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    return build_config(load_raw(path))


def dump_config(cfg: ExperimentConfig, path: str | Path | None = None) -> str:
    text = yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False)
    if path is not None:
        Path(path).write_text(text)
    return text
