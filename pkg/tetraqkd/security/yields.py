from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import bisect
from scipy.special import xlogy

from tetraqkd.channel.information import LN2
from tetraqkd.channel.source import SEPARABLE_NOISE, noise_value
from tetraqkd.keygen.analytic import N_MAX_DEFAULT, iteration_table
from tetraqkd.security.eavesdropper import i_ae_per_iteration

THRESHOLD_TOL = 1e-6
# Published 6-state noise threshold under the optimal incoherent attack.
SIX_STATE_REFERENCE_THRESHOLD = 0.236


class ThresholdNotBracketed(ValueError):
    """The yield does not change sign on the search interval."""


@dataclass(frozen=True)
class YieldReport:
    eps: float
    n_max: int
    i_ab: tuple[float, ...]
    i_ae: tuple[float, ...]

    @property
    def i_ab_total(self) -> float:
        return float(sum(self.i_ab))

    @property
    def i_ae_total(self) -> float:
        return float(sum(self.i_ae))

    @property
    def yield_ck(self) -> float:
        return self.i_ab_total - self.i_ae_total

    def to_row(self) -> dict[str, float]:
        row: dict[str, float] = {
            "eps": self.eps,
            "n_max": self.n_max,
            "i_ab_total": self.i_ab_total,
            "i_ae_total": self.i_ae_total,
            "yield": self.yield_ck,
        }
        for n, (ab, ae) in enumerate(zip(self.i_ab, self.i_ae), start=1):
            row[f"i_ab_{n}"] = ab
            row[f"i_ae_{n}"] = ae
        return row

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "n": np.arange(1, self.n_max + 1),
                "i_ab_n": self.i_ab,
                "i_ae_n": self.i_ae,
                "yield_n": np.subtract(self.i_ab, self.i_ae),
            }
        )


def ck_yield(eps: float, n_max: int = N_MAX_DEFAULT) -> YieldReport:
    """I_AB − I_AE with the same series truncation on both sides."""
    if not 0.0 <= eps <= SEPARABLE_NOISE:
        raise ValueError(f"the yield is defined for eps in [0, 2/3], got {eps}")
    i_ab = tuple(row.i_ab_n for row in iteration_table(eps, n_max))
    return YieldReport(float(eps), n_max, i_ab, tuple(i_ae_per_iteration(eps, n_max)))


def yield_curves(eps_grid: Iterable[float], n_max_values: Sequence[int]) -> pd.DataFrame:
    rows = []
    for n_max in n_max_values:
        for eps in eps_grid:
            report = ck_yield(float(eps), n_max)
            rows.append(
                {
                    "eps": report.eps,
                    "n_max": n_max,
                    "i_ab_total": report.i_ab_total,
                    "i_ae_total": report.i_ae_total,
                    "yield": report.yield_ck,
                }
            )
    return pd.DataFrame(rows)


def threshold(n_max: int, tol: float = THRESHOLD_TOL) -> float:
    """Noise level where the yield crosses zero, by bisection on (0, 2/3)."""

    def y(eps: float) -> float:
        return ck_yield(eps, n_max).yield_ck

    lo, hi = 0.0, SEPARABLE_NOISE
    y_lo, y_hi = y(lo), y(hi)
    if not (y_lo > 0.0 > y_hi):
        raise ThresholdNotBracketed(
            f"yield does not change sign on [0, 2/3] for n_max = {n_max}:"
            f" Y(0) = {y_lo}, Y(2/3) = {y_hi}"
        )
    root = bisect(y, lo, hi, xtol=tol)
    logging.info("CK threshold for n_max = %d: eps = %.6f", n_max, root)
    return float(root)


def six_state_iab(eps: float) -> float:
    """(1/6)(ε log₂ε + (2 − ε) log₂(2 − ε))."""
    e = noise_value(eps)
    return float((xlogy(e, e) + xlogy(2.0 - e, 2.0 - e)) / (6.0 * LN2))


def six_state_threshold(overlay: pd.DataFrame) -> float:
    """Where six_state_iab meets an externally supplied 6-state Eve curve (columns eps, i_ae)."""
    missing = {"eps", "i_ae"} - set(overlay.columns)
    if missing:
        raise ValueError(f"overlay is missing columns {sorted(missing)}")
    curve = overlay.sort_values("eps")
    xs, ys = curve["eps"].to_numpy(float), curve["i_ae"].to_numpy(float)

    def gap(eps: float) -> float:
        return six_state_iab(eps) - float(np.interp(eps, xs, ys))

    lo, hi = float(xs[0]), float(xs[-1])
    if not gap(lo) > 0.0 > gap(hi):
        raise ThresholdNotBracketed("6-state yield does not change sign over the overlay range")
    return float(bisect(gap, lo, hi, xtol=THRESHOLD_TOL))
