# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics are defined by ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

IMPL = "cython"

ctypedef cnp.intp_t intp

cdef double VAR_EPS = 1e-6
# a later offset must beat the best |score| by this much; near-ties keep scan order
cdef double TIE_EPS = 1e-9


def glcm_counts(const unsigned char[:, :] q, int levels, int dr, int dc):
    cdef Py_ssize_t h = q.shape[0], w = q.shape[1]
    cdef Py_ssize_t r0 = max(0, -dr), r1 = min(h, h - dr)
    cdef Py_ssize_t c0 = max(0, -dc), c1 = min(w, w - dc)
    out = np.zeros((levels, levels), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] g = out
    cdef Py_ssize_t r, c
    with nogil:
        for r in range(r0, r1):
            for c in range(c0, c1):
                g[q[r, c], q[r + dr, c + dc]] += 1
    return out


def template_origins(Py_ssize_t size, Py_ssize_t window, Py_ssize_t stride, Py_ssize_t search):
    cdef Py_ssize_t margin = min(search, (size - window) // 2)
    return np.arange(margin, size - window - margin + 1, stride, dtype=np.intp)


def ncc_peaks(prev, cur, int window, int stride, int search):
    cdef double[:, ::1] P = np.ascontiguousarray(prev, dtype=np.float64)
    cdef double[:, ::1] C = np.ascontiguousarray(cur, dtype=np.float64)
    cdef Py_ssize_t h = P.shape[0], w = P.shape[1]
    cdef double n = window * window
    rows_a = template_origins(h, window, stride, search)
    cols_a = template_origins(w, window, stride, search)
    cdef intp[::1] rows = rows_a
    cdef intp[::1] cols = cols_a
    cdef Py_ssize_t nt = rows.shape[0] * cols.shape[0]

    # integral images of cur and cur^2
    S1a = np.zeros((h + 1, w + 1))
    S2a = np.zeros((h + 1, w + 1))
    cdef double[:, ::1] S1 = S1a
    cdef double[:, ::1] S2 = S2a
    cdef Py_ssize_t i, j, k, ti, tj, r, c, rr, cc
    cdef double acc1, acc2, v
    with nogil:
        for i in range(h):
            acc1 = 0.0
            acc2 = 0.0
            for j in range(w):
                v = C[i, j]
                acc1 += v
                acc2 += v * v
                S1[i + 1, j + 1] = S1[i, j + 1] + acc1
                S2[i + 1, j + 1] = S2[i, j + 1] + acc2

    peaks_a = np.zeros(nt)
    dy_a = np.zeros(nt, dtype=np.intp)
    dx_a = np.zeros(nt, dtype=np.intp)
    keep_a = np.zeros(nt, dtype=np.uint8)
    cdef double[::1] peaks = peaks_a
    cdef intp[::1] dys = dy_a
    cdef intp[::1] dxs = dx_a
    cdef unsigned char[::1] keep = keep_a
    tpl_a = np.empty((window, window))
    cdef double[:, ::1] T = tpl_a
    cdef double tmean, tss, s1, s2, wvar, cross, val, best, best_abs
    cdef int dy, dx
    cdef intp bdy, bdx

    with nogil:
        k = 0
        for ti in range(rows.shape[0]):
            for tj in range(cols.shape[0]):
                r = rows[ti]
                c = cols[tj]
                tmean = 0.0
                for i in range(window):
                    for j in range(window):
                        tmean += P[r + i, c + j]
                tmean = tmean / n
                tss = 0.0
                for i in range(window):
                    for j in range(window):
                        v = P[r + i, c + j] - tmean
                        T[i, j] = v
                        tss += v * v
                if tss <= VAR_EPS:
                    k += 1
                    continue
                best = 0.0
                best_abs = -1.0
                bdy = 0
                bdx = 0
                for dy in range(-search, search + 1):
                    rr = r + dy
                    if rr < 0 or rr > h - window:
                        continue
                    for dx in range(-search, search + 1):
                        cc = c + dx
                        if cc < 0 or cc > w - window:
                            continue
                        s1 = S1[rr + window, cc + window] - S1[rr, cc + window] - S1[rr + window, cc] + S1[rr, cc]
                        s2 = S2[rr + window, cc + window] - S2[rr, cc + window] - S2[rr + window, cc] + S2[rr, cc]
                        wvar = s2 - s1 * s1 / n
                        if wvar <= VAR_EPS:
                            val = 0.0
                        else:
                            cross = 0.0
                            for i in range(window):
                                for j in range(window):
                                    cross += T[i, j] * C[rr + i, cc + j]
                            val = cross / sqrt(tss * wvar)
                            if val > 1.0:
                                val = 1.0
                            elif val < -1.0:
                                val = -1.0
                        if fabs(val) > best_abs + TIE_EPS:
                            best_abs = fabs(val)
                            best = val
                            bdy = dy
                            bdx = dx
                peaks[k] = best
                dys[k] = bdy
                dxs[k] = bdx
                keep[k] = 1
                k += 1
    mask = keep_a.astype(bool)
    return peaks_a[mask], dy_a[mask], dx_a[mask]


def build_tree(const double[:, ::1] X, const double[::1] y, const double[::1] weight,
               const intp[:, ::1] presorted, int max_depth, double min_leaf, int mtry,
               const double[::1] draws):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, f, g, s, p, m = 0
    for i in range(n):
        if weight[i] > 0:
            m += 1
    cdef Py_ssize_t cap = 2 * m + 1

    idx_a = np.empty((d, max(m, 1)), dtype=np.intp)
    cdef intp[:, ::1] idx = idx_a
    for f in range(d):
        p = 0
        for i in range(n):
            s = presorted[f, i]
            if weight[s] > 0:
                idx[f, p] = s
                p += 1

    feature_a = np.full(cap, -1, dtype=np.intp)
    threshold_a = np.zeros(cap)
    right_a = np.full(cap, -1, dtype=np.intp)
    value_a = np.zeros(cap)
    gain_a = np.zeros(cap)
    nweight_a = np.zeros(cap)
    cdef intp[::1] feature = feature_a
    cdef double[::1] threshold = threshold_a
    cdef intp[::1] right = right_a
    cdef double[::1] value = value_a
    cdef double[::1] gain = gain_a
    cdef double[::1] nweight = nweight_a

    st_a = np.zeros((cap + 1, 4), dtype=np.intp)
    cdef intp[:, ::1] st = st_a
    perm_a = np.empty(d, dtype=np.intp)
    cdef intp[::1] perm = perm_a
    tmp_a = np.empty(max(m, 1), dtype=np.intp)
    cdef intp[::1] tmp = tmp_a
    goleft_a = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] goleft = goleft_a

    cdef Py_ssize_t top = 0, n_nodes = 0, pos = 0, ndraws = draws.shape[0]
    cdef Py_ssize_t start, end, depth, right_of, node, k, best_k, nl, nr
    cdef intp best_f, t
    cdef double s_w, s_wy, ymin, ymax, yv, wv, tw, ts, cw, cs, score, imp, best_imp, best_thr, a, b, thr
    cdef bint overflow = False

    if m > 0:
        st[0, 0] = 0
        st[0, 1] = m
        st[0, 2] = 0
        st[0, 3] = -1
        top = 1

    with nogil:
        while top > 0:
            top -= 1
            start = st[top, 0]
            end = st[top, 1]
            depth = st[top, 2]
            right_of = st[top, 3]
            node = n_nodes
            n_nodes += 1
            if right_of >= 0:
                right[right_of] = node

            s_w = 0.0
            s_wy = 0.0
            s = idx[0, start]
            ymin = y[s]
            ymax = y[s]
            for p in range(start, end):
                s = idx[0, p]
                wv = weight[s]
                yv = y[s]
                s_w += wv
                s_wy += wv * yv
                if yv < ymin:
                    ymin = yv
                if yv > ymax:
                    ymax = yv
            value[node] = s_wy / s_w
            nweight[node] = s_w
            if depth >= max_depth or s_w < 2.0 * min_leaf or ymax == ymin:
                continue

            if pos + mtry > ndraws:
                overflow = True
                break
            for i in range(d):
                perm[i] = i
            for i in range(mtry):
                j = i + <Py_ssize_t>(draws[pos + i] * (d - i))
                t = perm[i]
                perm[i] = perm[j]
                perm[j] = t
            pos += mtry

            best_imp = 0.0
            best_f = -1
            best_k = -1
            best_thr = 0.0
            for i in range(mtry):
                f = perm[i]
                tw = 0.0
                ts = 0.0
                for p in range(start, end):
                    s = idx[f, p]
                    wv = weight[s]
                    tw += wv
                    ts += wv * y[s]
                cw = 0.0
                cs = 0.0
                for p in range(start, end - 1):
                    s = idx[f, p]
                    wv = weight[s]
                    cw += wv
                    cs += wv * y[s]
                    a = X[s, f]
                    b = X[idx[f, p + 1], f]
                    if not (a < b):
                        continue
                    if cw < min_leaf or (tw - cw) < min_leaf:
                        continue
                    score = cs * cs / cw + (ts - cs) * (ts - cs) / (tw - cw)
                    imp = score - ts * ts / tw
                    if imp > best_imp:
                        best_imp = imp
                        best_f = f
                        best_k = p - start
                        thr = a + (b - a) * 0.5
                        best_thr = a if thr >= b else thr
            if best_f < 0:
                continue

            feature[node] = best_f
            threshold[node] = best_thr
            gain[node] = best_imp
            nl = best_k + 1
            for p in range(start, end):
                goleft[idx[best_f, p]] = 1 if p - start < nl else 0
            for g in range(d):
                k = start
                nr = 0
                for p in range(start, end):
                    s = idx[g, p]
                    if goleft[s]:
                        idx[g, k] = s
                        k += 1
                    else:
                        tmp[nr] = s
                        nr += 1
                for p in range(nr):
                    idx[g, k + p] = tmp[p]

            st[top, 0] = start + nl
            st[top, 1] = end
            st[top, 2] = depth + 1
            st[top, 3] = node
            top += 1
            st[top, 0] = start
            st[top, 1] = start + nl
            st[top, 2] = depth + 1
            st[top, 3] = -1
            top += 1

    if overflow:
        raise RuntimeError("random draw stream exhausted")
    return (feature_a[:n_nodes], threshold_a[:n_nodes], right_a[:n_nodes],
            value_a[:n_nodes], gain_a[:n_nodes], nweight_a[:n_nodes])


def predict_tree(const double[:, ::1] X, const intp[::1] feature, const double[::1] threshold,
                 const intp[::1] right, const double[::1] value):
    cdef Py_ssize_t n = X.shape[0], i, node
    out_a = np.empty(n)
    cdef double[::1] out = out_a
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = node + 1
                else:
                    node = right[node]
            out[i] = value[node]
    return out_a
