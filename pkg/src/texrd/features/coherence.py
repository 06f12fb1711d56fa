"""Temporal coherence: magnitude-squared spectral coherence of frame pairs."""

from __future__ import annotations

import numpy as np

from .moments import StatMoments, stat_moments

TC_BINS = 64
# cells with less power than this fraction of the frame's strongest cell are
# treated as empty
_REL_POWER_FLOOR = 1e-12


def _cell_edges(n, cells):
    return (np.arange(cells) * n) // cells


def _cell_average(z, cells_r, cells_c):
    """Mean over a cells_r x cells_c partition; cell sizes differ by at most one."""
    h, w = z.shape
    er, ec = _cell_edges(h, cells_r), _cell_edges(w, cells_c)
    sums = np.add.reduceat(np.add.reduceat(z, er, axis=0), ec, axis=1)
    counts = np.outer(np.diff(np.append(er, h)), np.diff(np.append(ec, w)))
    return sums / counts


def coherence_map(prev, cur, block: int = 32) -> np.ndarray:
    """Per-cell coherence in [0, 1] on a block x block grid of spectral cells.

    Both frames are mean-removed and transformed whole; auto and cross spectra
    are averaged over adjacent frequency bins so that each estimate pools
    about (H/block)(W/block) bins, the same number of averages as Welch over
    block x block tiles, without tile-edge leakage that would otherwise break
    coherence under pure translation.
    """
    prev = np.asarray(prev, dtype=np.float64)
    cur = np.asarray(cur, dtype=np.float64)
    if prev.shape != cur.shape:
        raise ValueError(f"frame shapes differ: {prev.shape} vs {cur.shape}")
    h, w = prev.shape
    if block < 8 or h < block or w < block or h * w < 2 * block * block:
        raise ValueError(f"frame {w}x{h} too small for {block}x{block} spectral cells")
    fp = np.fft.fft2(prev - prev.mean())
    fc = np.fft.fft2(cur - cur.mean())
    pxx = _cell_average((fp * fp.conj()).real, block, block)
    pyy = _cell_average((fc * fc.conj()).real, block, block)
    pxy = _cell_average(fp * fc.conj(), block, block)

    empty_x = pxx <= _REL_POWER_FLOOR * pxx.max()
    empty_y = pyy <= _REL_POWER_FLOOR * pyy.max()
    denom = np.where(empty_x | empty_y, 1.0, pxx * pyy)
    coh = np.clip((pxy * pxy.conj()).real / denom, 0.0, 1.0)
    coh = np.where(empty_x & empty_y, 1.0, np.where(empty_x | empty_y, 0.0, coh))
    return coh


def temporal_coherence_stats(prev, cur, block: int = 32) -> StatMoments:
    return stat_moments(coherence_map(prev, cur, block), bins=TC_BINS, value_range=(0.0, 1.0))
