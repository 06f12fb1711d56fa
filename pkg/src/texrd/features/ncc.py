"""Template-matching NCC peaks between successive frames."""

from __future__ import annotations

import numpy as np

from .. import kernels
from .moments import StatMoments, stat_moments

NCC_BINS = 64


def ncc_peaks(prev, cur, window: int = 16, stride: int = 16, search: int = 8):
    """Per-template signed ZNCC peak of ``prev`` templates searched in ``cur``.

    Templates are w x w blocks of ``prev`` tiled at ``stride``, inset from the
    border by up to ``search`` so that their displaced copies stay inside the
    frame. Each is matched against ``cur`` for every offset in
    [-search, search]^2 that keeps the window in bounds; the peak is the score
    of largest magnitude (sign kept), so a negated frame peaks at -1.
    Flat templates are skipped. Returns ``(peaks, dy, dx)``.
    """
    prev = np.asarray(prev, dtype=np.float64)
    cur = np.asarray(cur, dtype=np.float64)
    if prev.shape != cur.shape:
        raise ValueError(f"frame shapes differ: {prev.shape} vs {cur.shape}")
    if window < 1 or stride < 1 or search < 0:
        raise ValueError("window and stride must be >= 1, search >= 0")
    if window > min(prev.shape):
        raise ValueError(f"window {window} larger than frame {prev.shape}")
    return kernels.ncc_peaks(prev, cur, window, stride, search)


def ncc_peak_stats(prev, cur, window: int = 16, stride: int = 16, search: int = 8) -> StatMoments:
    peaks, _, _ = ncc_peaks(prev, cur, window, stride, search)
    if peaks.size == 0:
        raise ValueError("no template with nonzero variance; NCC undefined")
    return stat_moments(peaks, bins=NCC_BINS, value_range=(-1.0, 1.0))
