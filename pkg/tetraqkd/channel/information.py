from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from tetraqkd.qmath.checks import SCALAR_TOL
from tetraqkd.qmath.tables import JointTable

LN2 = np.log(2.0)
DEFAULT_BOOTSTRAP = 200


def binary_entropy(p: float) -> float:
    return float(-(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)) / LN2)


def _plugin_mi(joint: np.ndarray) -> np.ndarray:
    """Plug-in MI in bits over the last two axes; leading axes are a batch."""
    total = joint.sum(axis=(-2, -1), keepdims=True)
    p = joint / total
    rows = p.sum(axis=-1, keepdims=True)
    cols = p.sum(axis=-2, keepdims=True)
    mi = (xlogy(p, p) - xlogy(p, rows * cols)).sum(axis=(-2, -1)) / LN2
    return np.clip(mi, 0.0, None)


def mutual_information(table: JointTable, split: int = 1) -> float:
    """MI in bits between the first ``split`` parties and the rest."""
    if abs(table.probs.sum() - 1.0) > SCALAR_TOL:
        raise ValueError(f"table is not normalized (sum {table.probs.sum():.15f})")
    if not 0 < split < table.probs.ndim:
        raise ValueError(f"split {split} must separate the {table.probs.ndim} parties")
    rows = int(np.prod(table.shape[:split]))
    return float(_plugin_mi(table.probs.reshape(rows, -1)))


@dataclass(frozen=True)
class MIEstimate:
    bits: float
    stderr: float
    bias: float
    n: int

    @property
    def corrected(self) -> float:
        return self.bits - self.bias


def empirical_mi(
    counts: np.ndarray,
    bootstrap: int = DEFAULT_BOOTSTRAP,
    rng: np.random.Generator | None = None,
) -> MIEstimate:
    """Plug-in MI of a 2-D contingency table with a bootstrap standard error.

    ``bias`` is the leading-order positive bias (r − 1)(c − 1)/(2N ln 2), r and c
    counting occupied rows and columns.
    """
    c = np.asarray(counts, dtype=float)
    if c.ndim != 2:
        raise ValueError(f"expected a 2-D contingency table, got shape {c.shape}")
    if c.size and c.min() < 0:
        raise ValueError("counts must be non-negative")
    n = int(round(c.sum()))
    if n == 0:
        raise ValueError("empty counts")
    bits = float(_plugin_mi(c))
    occupied_rows = int((c.sum(axis=1) > 0).sum())
    occupied_cols = int((c.sum(axis=0) > 0).sum())
    bias = (occupied_rows - 1) * (occupied_cols - 1) / (2.0 * n * LN2)

    stderr = 0.0
    if bootstrap > 1:
        rng = np.random.default_rng(0) if rng is None else rng
        resampled = rng.multinomial(n, (c / n).ravel(), size=bootstrap).reshape(bootstrap, *c.shape)
        stderr = float(np.std(_plugin_mi(resampled.astype(float)), ddof=1))
    return MIEstimate(bits, stderr, bias, n)
