"""Normalized Laplacian pyramid (NLP) distance between two frames."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import convolve1d

BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
NLP_CONSTANT = 0.17


def blur(x, gain: float = 1.0) -> np.ndarray:
    k = BINOMIAL5 * gain
    y = convolve1d(np.asarray(x, dtype=np.float64), k, axis=0, mode="mirror")
    return convolve1d(y, k, axis=1, mode="mirror")


def pyr_down(x) -> np.ndarray:
    return blur(x)[::2, ::2]


def pyr_up(x, shape) -> np.ndarray:
    up = np.zeros(shape)
    up[::2, ::2] = x
    return blur(up, gain=2.0)


def laplacian_pyramid(x, scales: int) -> list[np.ndarray]:
    """``scales - 1`` band-pass levels followed by the low-pass residual."""
    cur = np.asarray(x, dtype=np.float64)
    bands = []
    for _ in range(scales - 1):
        low = pyr_down(cur)
        bands.append(cur - pyr_up(low, cur.shape))
        cur = low
    bands.append(cur)
    return bands


def _normalize(band, const):
    denom = blur(np.abs(band)) + const
    out = np.zeros_like(band)
    np.divide(band, denom, out=out, where=denom > 0)
    return out


def nlp_distance(prev, cur, scales: int = 4) -> float:
    """Mean over scales of the RMS difference of divisively normalized bands.

    Each band is divided by its local amplitude plus 0.17 times the band's
    dynamic range over both frames.
    """
    prev = np.asarray(prev, dtype=np.float64)
    cur = np.asarray(cur, dtype=np.float64)
    if prev.shape != cur.shape:
        raise ValueError(f"frame shapes differ: {prev.shape} vs {cur.shape}")
    if scales < 1:
        raise ValueError("scales must be >= 1")
    if min(prev.shape) / 2 ** (scales - 1) < 2:
        raise ValueError(f"frame {prev.shape} too small for {scales} scales")
    total = 0.0
    for bp, bc in zip(laplacian_pyramid(prev, scales), laplacian_pyramid(cur, scales)):
        lo = min(bp.min(), bc.min())
        hi = max(bp.max(), bc.max())
        const = NLP_CONSTANT * (hi - lo)
        diff = _normalize(bc, const) - _normalize(bp, const)
        total += float(np.sqrt(np.mean(diff * diff)))
    return total / scales
