"""Bjontegaard delta metrics between two RD curves (classic cubic fit)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rd_models import RdCurve

MIN_POINTS = 4


class BdError(ValueError):
    pass


@dataclass(frozen=True)
class BdResult:
    bd_psnr: float | None = None
    bd_rate: float | None = None
    rate_overlap: tuple[float, float] | None = None  # log10 bpp
    psnr_overlap: tuple[float, float] | None = None  # dB


def _cubic(x, y, what):
    if x.size < MIN_POINTS:
        raise BdError(f"BD needs >= {MIN_POINTS} points per curve, got {x.size}")
    if np.unique(x).size < MIN_POINTS:
        raise BdError(f"collinear {what}: fewer than {MIN_POINTS} distinct values")
    return np.polyfit(x, y, 3)


def _mean_gap(p_ref, p_test, lo, hi):
    diff = np.polyint(np.polysub(p_test, p_ref))
    return float((np.polyval(diff, hi) - np.polyval(diff, lo)) / (hi - lo))


def _overlap(a, b, what):
    lo = max(a.min(), b.min())
    hi = min(a.max(), b.max())
    if not hi > lo:
        raise BdError(f"empty {what} overlap")
    return float(lo), float(hi)


def bd_psnr(reference: RdCurve, test: RdCurve) -> BdResult:
    """Mean PSNR gap (test minus reference) over the shared log10-rate range."""
    xr, xt = np.log10(reference.rates), np.log10(test.rates)
    pr = _cubic(xr, reference.psnrs, "rates")
    pt = _cubic(xt, test.psnrs, "rates")
    lo, hi = _overlap(xr, xt, "rate")
    return BdResult(bd_psnr=_mean_gap(pr, pt, lo, hi), rate_overlap=(lo, hi))


def _check_invertible(curve: RdCurve):
    if np.any(np.diff(curve.psnrs) <= 0):
        raise BdError(f"{curve.key}: PSNR not strictly increasing with rate; log-rate(PSNR) is not invertible")


def bd_rate(reference: RdCurve, test: RdCurve) -> BdResult:
    """Percent rate difference at equal PSNR; positive means test spends more bits."""
    _check_invertible(reference)
    _check_invertible(test)
    qr, qt = reference.psnrs, test.psnrs
    pr = _cubic(qr, np.log10(reference.rates), "PSNR values")
    pt = _cubic(qt, np.log10(test.rates), "PSNR values")
    lo, hi = _overlap(qr, qt, "PSNR")
    delta = _mean_gap(pr, pt, lo, hi)
    return BdResult(bd_rate=float((10.0 ** delta - 1.0) * 100.0), psnr_overlap=(lo, hi))


def bd_both(reference: RdCurve, test: RdCurve) -> BdResult:
    a = bd_psnr(reference, test)
    b = bd_rate(reference, test)
    return BdResult(a.bd_psnr, b.bd_rate, a.rate_overlap, b.psnr_overlap)
