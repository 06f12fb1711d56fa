"""Correlation coefficients used across the package."""

import numpy as np
from scipy.stats import rankdata


def pearson(x, y) -> float:
    """Textbook Pearson coefficient; NaN when either side has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError("length mismatch")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return float("nan")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties."""
    return pearson(rankdata(x), rankdata(y))
