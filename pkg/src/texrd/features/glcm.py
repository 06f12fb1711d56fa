"""Gray-level co-occurrence matrices and their five descriptors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass(frozen=True)
class Glcm:
    levels: int
    counts: np.ndarray
    probabilities: np.ndarray
    offset: tuple[int, int]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class GlcmDescriptors:
    contrast: float
    correlation: float
    energy: float
    homogeneity: float
    entropy: float


def quantize(frame, levels: int) -> np.ndarray:
    """Map 8-bit intensities to ``levels`` bins with floor(y * levels / 256)."""
    y = np.asarray(frame).astype(np.int64)
    return ((y * levels) // 256).astype(np.uint8)


def compute_glcm(frame, levels: int = 32, offset: tuple[int, int] = (0, 1)) -> Glcm:
    """Non-symmetric co-occurrence counts of pixel (r, c) with (r + dr, c + dc)."""
    if not 2 <= levels <= 256:
        raise ValueError(f"levels must be in [2, 256], got {levels}")
    dr, dc = (int(v) for v in offset)
    if dr == 0 and dc == 0:
        raise ValueError("offset must be nonzero")
    frame = np.asarray(frame)
    h, w = frame.shape
    if abs(dr) >= h or abs(dc) >= w:
        raise ValueError(f"frame {w}x{h} too small for offset {offset}")
    q = np.ascontiguousarray(quantize(frame, levels))
    counts = kernels.glcm_counts(q, levels, dr, dc)
    return Glcm(levels, counts, counts / counts.sum(), (dr, dc))


def glcm_descriptors(glcm: Glcm) -> GlcmDescriptors:
    p = glcm.probabilities
    g = glcm.levels
    i = np.arange(g, dtype=np.float64)[:, None]
    j = np.arange(g, dtype=np.float64)[None, :]
    contrast = float(((i - j) ** 2 * p).sum())
    energy = float((p * p).sum())
    homogeneity = float((p / (1.0 + np.abs(i - j))).sum())
    nz = p[p > 0]
    entropy = float(-(nz * np.log2(nz)).sum())

    pr = p.sum(axis=1)
    pc = p.sum(axis=0)
    idx = np.arange(g, dtype=np.float64)
    m_r = float((idx * pr).sum())
    m_c = float((idx * pc).sum())
    s_r = float(np.sqrt(((idx - m_r) ** 2 * pr).sum()))
    s_c = float(np.sqrt(((idx - m_c) ** 2 * pc).sum()))
    if s_r * s_c <= 1e-12:
        correlation = 0.0
    else:
        correlation = float(((i - m_r) * (j - m_c) * p).sum() / (s_r * s_c))
        correlation = min(1.0, max(-1.0, correlation))
    return GlcmDescriptors(contrast, correlation, energy, homogeneity, entropy)
