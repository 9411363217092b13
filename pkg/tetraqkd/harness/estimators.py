from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.stats import chisquare

from tetraqkd.channel.information import MIEstimate, empirical_mi
from tetraqkd.qmath.tables import JointTable


class GoodnessOfFit(NamedTuple):
    statistic: float
    pvalue: float
    dof: int


def goodness_of_fit(counts: np.ndarray, table: JointTable) -> GoodnessOfFit:
    """Pearson χ² of observed counts against the exact table over cells of non-zero mass."""
    observed = np.asarray(counts, dtype=float).ravel()
    probs = table.probs.ravel()
    if observed.size != probs.size:
        raise ValueError(f"{observed.size} count cells for a {probs.size}-cell table")
    support = probs > 0
    if observed[~support].any():
        return GoodnessOfFit(float("inf"), 0.0, int(support.sum()) - 1)
    expected = probs[support] / probs[support].sum() * observed.sum()
    stat, pvalue = chisquare(observed[support], expected)
    return GoodnessOfFit(float(stat), float(pvalue), int(support.sum()) - 1)


def z_score(estimate: float, target: float, stderr: float) -> float:
    if not np.isfinite(stderr) or stderr <= 0:
        return 0.0 if np.isclose(estimate, target, rtol=0.0, atol=1e-12) else float("inf")
    return float((estimate - target) / stderr)


__all__ = ["GoodnessOfFit", "MIEstimate", "empirical_mi", "goodness_of_fit", "z_score"]
