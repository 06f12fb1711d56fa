"""Haar DWT and the average local peak distance (ALPD) coarseness measure."""

from __future__ import annotations

import numpy as np


def haar_dwt2(x):
    """One orthonormal 2-D Haar level: (LL, HL, LH, HH); odd edges are cropped."""
    x = np.asarray(x, dtype=np.float64)
    h, w = x.shape
    x = x[: h - h % 2, : w - w % 2]
    a = x[0::2, 0::2]
    b = x[0::2, 1::2]
    c = x[1::2, 0::2]
    d = x[1::2, 1::2]
    ll = (a + b + c + d) / 2.0
    hl = (a - b + c - d) / 2.0
    lh = (a + b - c - d) / 2.0
    hh = (a - b - c + d) / 2.0
    return ll, hl, lh, hh


def haar_wavedec2(x, levels: int = 3):
    """Multilevel decomposition: [(HL, LH, HH) for level 1..levels], final LL."""
    details = []
    ll = np.asarray(x, dtype=np.float64)
    for _ in range(levels):
        ll, hl, lh, hh = haar_dwt2(ll)
        details.append((hl, lh, hh))
    return details, ll


def detail_magnitude(frame, level: int = 3) -> np.ndarray:
    details, _ = haar_wavedec2(frame, level)
    hl, lh, hh = details[level - 1]
    return np.abs(hl) + np.abs(lh) + np.abs(hh)


def scan_peaks(values) -> np.ndarray:
    """Positions of strict local maxima above mean + std in a 1-D scan."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2:
        return np.zeros(0, dtype=np.intp)
    left = np.concatenate(([-np.inf], v[:-1]))
    right = np.concatenate((v[1:], [-np.inf]))
    thresh = v.mean() + v.std()
    return np.flatnonzero((v > left) & (v > right) & (v > thresh))


def alpd(frame, level: int = 3) -> float:
    """Sum of distances between consecutive level-3 detail peaks over the peak count.

    Peaks are taken along the row-major scan of |HL| + |LH| + |HH|; fewer than
    two peaks gives 0.
    """
    frame = np.asarray(frame)
    min_side = 4 * 2 ** level
    if min(frame.shape) < min_side:
        raise ValueError(f"frame {frame.shape} too small for {level} DWT levels (need {min_side})")
    peaks = scan_peaks(detail_magnitude(frame, level))
    k = peaks.size
    if k < 2:
        return 0.0
    return float(np.abs(np.diff(peaks)).sum() / k)
