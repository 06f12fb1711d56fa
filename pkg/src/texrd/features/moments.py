"""Population summaries shared by the feature extractors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StatMoments:
    mean: float
    std: float
    skewness: float
    kurtosis: float
    entropy: float
    # True when the population had (numerically) zero variance and skewness
    # and kurtosis were set to 0 by convention
    degenerate: bool = False

    def as_tuple(self):
        return (self.mean, self.std, self.skewness, self.kurtosis, self.entropy)


def histogram_entropy(values, bins: int, value_range: tuple[float, float]) -> float:
    """Shannon entropy in bits of a fixed-range histogram of ``values``."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        return 0.0
    counts, _ = np.histogram(np.clip(values, *value_range), bins=bins, range=value_range)
    p = counts[counts > 0] / values.size
    return float(-(p * np.log2(p)).sum())


def sample_std(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1))


def stat_moments(values, bins: int = 64, value_range: tuple[float, float] | None = None) -> StatMoments:
    """Mean, sample std, skewness g1, Pearson kurtosis and histogram entropy.

    ``value_range`` defaults to the data range.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty population")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev * dev))
    scale = max(1.0, float(np.abs(x).max()))
    degenerate = m2 <= (1e-12 * scale) ** 2
    if degenerate:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(dev ** 3) / m2 ** 1.5)
        kurt = float(np.mean(dev ** 4) / (m2 * m2))
    if value_range is None:
        lo, hi = float(x.min()), float(x.max())
        value_range = (lo, hi) if hi > lo else (lo - 0.5, lo + 0.5)
    ent = histogram_entropy(x, bins, value_range)
    return StatMoments(mean, sample_std(x), skew, kurt, ent, degenerate)
