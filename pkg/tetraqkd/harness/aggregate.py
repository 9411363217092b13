from __future__ import annotations

from typing import List

import numpy as np
import pandas as pd


def aggregate_trials(frame: pd.DataFrame, metric_cols: List[str]) -> pd.DataFrame:
    """Mean, std and 95% half-width per (eps, iteration) across Monte Carlo trials."""
    grouped = frame.groupby(["eps", "n"])
    agg = grouped[metric_cols].agg(["mean", "std"]).reset_index()
    agg.columns = ["_".join(col).rstrip("_") for col in agg.columns]

    n_trials = frame["trial"].nunique()
    for col in metric_cols:
        agg[f"{col}_ci95"] = 1.96 * agg[f"{col}_std"].fillna(0) / max(np.sqrt(n_trials), 1)
    agg["trials"] = n_trials
    return agg
