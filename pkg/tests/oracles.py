"""Slow, direct reference implementations used to check the optimized code."""

import math

import numpy as np


def glcm_bruteforce(frame, levels, offset):
    q = (np.asarray(frame).astype(np.int64) * levels) // 256
    h, w = q.shape
    dr, dc = offset
    g = np.zeros((levels, levels), dtype=np.int64)
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                g[q[r, c], q[r2, c2]] += 1
    return g


def zncc(a, b, eps=1e-6):
    a = a - a.mean()
    b = b - b.mean()
    sa, sb = (a * a).sum(), (b * b).sum()
    if sb <= eps:
        return 0.0
    return float(np.clip((a * b).sum() / math.sqrt(sa * sb), -1, 1))


def ncc_bruteforce(prev, cur, window, stride, search):
    prev = np.asarray(prev, dtype=np.float64)
    cur = np.asarray(cur, dtype=np.float64)
    h, w = prev.shape

    def origins(size):
        m = min(search, (size - window) // 2)
        return range(m, size - window - m + 1, stride)

    peaks = []
    for r in origins(h):
        for c in origins(w):
            t = prev[r:r + window, c:c + window]
            if ((t - t.mean()) ** 2).sum() <= 1e-6:
                continue
            best, best_abs = 0.0, -1.0
            for dy in range(-search, search + 1):
                for dx in range(-search, search + 1):
                    rr, cc = r + dy, c + dx
                    if rr < 0 or cc < 0 or rr + window > h or cc + window > w:
                        continue
                    v = zncc(t, cur[rr:rr + window, cc:cc + window])
                    if abs(v) > best_abs + 1e-9:
                        best, best_abs = v, abs(v)
            peaks.append(best)
    return np.array(peaks)


def haar_matrices(n):
    """Orthonormal analysis matrices (lowpass rows, highpass rows) for length n."""
    lo = np.zeros((n // 2, n))
    hi = np.zeros((n // 2, n))
    s = 1 / math.sqrt(2)
    for k in range(n // 2):
        lo[k, 2 * k] = lo[k, 2 * k + 1] = s
        hi[k, 2 * k], hi[k, 2 * k + 1] = s, -s
    return lo, hi


def haar_matrix_form(x):
    """(LL, HL, LH, HH) with HL = column-highpass, LH = row-highpass."""
    x = np.asarray(x, dtype=np.float64)
    h, w = x.shape
    x = x[: h - h % 2, : w - w % 2]
    lr, hr = haar_matrices(x.shape[0])
    lc, hc = haar_matrices(x.shape[1])
    return lr @ x @ lc.T, lr @ x @ hc.T, hr @ x @ lc.T, hr @ x @ hc.T


def ols_normal_equations(x, y, degree):
    A = np.vander(np.asarray(x, dtype=np.float64), degree + 1)
    return np.linalg.solve(A.T @ A, A.T @ np.asarray(y, dtype=np.float64))


def _trapezoid(y, x):
    return float(((y[1:] + y[:-1]) * np.diff(x)).sum() / 2)


def bd_psnr_quadrature(r1, q1, r2, q2, n=10_000):
    x1, x2 = np.log10(r1), np.log10(r2)
    c1, c2 = ols_normal_equations(x1, q1, 3), ols_normal_equations(x2, q2, 3)
    lo, hi = max(x1.min(), x2.min()), min(x1.max(), x2.max())
    t = np.linspace(lo, hi, n)
    return _trapezoid(np.polyval(c2, t) - np.polyval(c1, t), t) / (hi - lo)


def bd_rate_quadrature(r1, q1, r2, q2, n=10_000):
    x1, x2 = np.log10(r1), np.log10(r2)
    c1, c2 = ols_normal_equations(q1, x1, 3), ols_normal_equations(q2, x2, 3)
    lo, hi = max(min(q1), min(q2)), min(max(q1), max(q2))
    t = np.linspace(lo, hi, n)
    d = _trapezoid(np.polyval(c2, t) - np.polyval(c1, t), t) / (hi - lo)
    return (10 ** d - 1) * 100


def pearson_textbook(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)
