"""Dense Farneback optical flow and the per-GoP flow statistics."""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .moments import sample_std

FLOW_STAT_NAMES = (
    "meanOF_mag", "stdOF_mag", "meanOF_or", "stdOF_or", "meanOF_curl", "stdOF_curl",
    "meanOF_ang", "stdOF_ang", "stdOF_covVx", "meanOF_covVy", "stdOF_covVy",
    "meanOF_covVxVy", "stdOF_covVxVy",
)


@dataclass(frozen=True)
class FlowParams:
    levels: int = 3
    winsize: int = 15
    iterations: int = 3
    poly_n: int = 7
    poly_sigma: float = 1.5
    pyr_scale: float = 0.5


@dataclass(frozen=True)
class FlowField:
    u: np.ndarray
    v: np.ndarray
    degenerate: bool = False

    @property
    def shape(self):
        return self.u.shape


def farneback_flow(prev, cur, params: FlowParams = FlowParams()) -> FlowField:
    """Displacement of ``prev`` content into ``cur`` (pixels/frame).

    Frames are offset by min(prev) before the float32 conversion so an integer
    intensity shift of both frames yields identical input to the solver.
    """
    prev = np.asarray(prev, dtype=np.float64)
    cur = np.asarray(cur, dtype=np.float64)
    if prev.shape != cur.shape:
        raise ValueError(f"frame shapes differ: {prev.shape} vs {cur.shape}")
    if min(prev.shape) < 32:
        raise ValueError(f"frame {prev.shape} smaller than 32x32")
    if prev.min() == prev.max() and cur.min() == cur.max():
        z = np.zeros(prev.shape)
        return FlowField(z, z.copy(), degenerate=True)
    base = prev.min()
    flow = cv2.calcOpticalFlowFarneback(
        (prev - base).astype(np.float32),
        (cur - base).astype(np.float32),
        None,
        params.pyr_scale,
        params.levels,
        params.winsize,
        params.iterations,
        params.poly_n,
        params.poly_sigma,
        0,
    ).astype(np.float64)
    flow[~np.isfinite(flow)] = 0.0
    return FlowField(flow[..., 0], flow[..., 1])


def orientation(u, v) -> np.ndarray:
    """atan2(v, u) in (-pi, pi]; zero vectors map to 0."""
    theta = np.arctan2(v, u)
    theta[theta == -np.pi] = np.pi
    theta[(u == 0) & (v == 0)] = 0.0
    return theta


def curl(u, v) -> np.ndarray:
    """dv/dx - du/dy by central differences (one-sided at the border)."""
    return np.gradient(v, axis=1) - np.gradient(u, axis=0)


def _wrap(a):
    return np.mod(a + np.pi, 2 * np.pi) - np.pi


def flow_statistics(flows) -> dict[str, float]:
    """F32-F44 from per-field scalar summaries aggregated over the GoP.

    Each field contributes its spatial mean of magnitude, orientation and curl
    and its variances/covariance of u and v; angular velocity is the mean
    wrapped orientation change between consecutive fields. GoP statistics are
    the mean and sample std of those per-field values.
    """
    flows = list(flows)
    if len(flows) < 2:
        raise ValueError("flow statistics need at least 2 flow fields")
    mag, ori, crl, vu, vv, cuv, thetas = [], [], [], [], [], [], []
    for f in flows:
        u = np.asarray(f.u, dtype=np.float64)
        v = np.asarray(f.v, dtype=np.float64)
        th = orientation(u, v)
        thetas.append(th)
        mag.append(np.hypot(u, v).mean())
        ori.append(th.mean())
        crl.append(curl(u, v).mean())
        c = np.cov(u.ravel(), v.ravel())
        vu.append(c[0, 0])
        vv.append(c[1, 1])
        cuv.append(c[0, 1])
    ang = [_wrap(b - a).mean() for a, b in zip(thetas[:-1], thetas[1:])]
    return {
        "meanOF_mag": float(np.mean(mag)),
        "stdOF_mag": sample_std(mag),
        "meanOF_or": float(np.mean(ori)),
        "stdOF_or": sample_std(ori),
        "meanOF_curl": float(np.mean(crl)),
        "stdOF_curl": sample_std(crl),
        "meanOF_ang": float(np.mean(ang)),
        "stdOF_ang": sample_std(ang),
        "stdOF_covVx": sample_std(vu),
        "meanOF_covVy": float(np.mean(vv)),
        "stdOF_covVy": sample_std(vv),
        "meanOF_covVxVy": float(np.mean(cuv)),
        "stdOF_covVxVy": sample_std(cuv),
    }
