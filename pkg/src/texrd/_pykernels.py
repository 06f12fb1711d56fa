"""Pure numpy implementations of the hot kernels.

These define the reference semantics; ``_ckernels.pyx`` must produce the same
results (bit-identical for tree building, within rounding for NCC).
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

IMPL = "python"

# below this sum of squared deviations a window is treated as flat (8-bit
# data has a minimum nonzero value of about 0.5)
VAR_EPS = 1e-6
# a later offset must beat the best |score| by this much; near-ties keep scan order
TIE_EPS = 1e-9


def glcm_counts(q, levels, dr, dc):
    h, w = q.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r1 <= r0 or c1 <= c0:
        return np.zeros((levels, levels), dtype=np.int64)
    a = q[r0:r1, c0:c1].astype(np.int64)
    b = q[r0 + dr:r1 + dr, c0 + dc:c1 + dc].astype(np.int64)
    flat = np.bincount((a * levels + b).ravel(), minlength=levels * levels)
    return flat.reshape(levels, levels)


def template_origins(size, window, stride, search):
    margin = min(search, (size - window) // 2)
    return np.arange(margin, size - window - margin + 1, stride, dtype=np.intp)


def ncc_peaks(prev, cur, window, stride, search):
    """Signed highest-magnitude ZNCC peak per template.

    Returns (peaks, dy, dx) for every template with nonzero variance.
    """
    prev = np.ascontiguousarray(prev, dtype=np.float64)
    cur = np.ascontiguousarray(cur, dtype=np.float64)
    h, w = prev.shape
    n = float(window * window)
    rows = template_origins(h, window, stride, search)
    cols = template_origins(w, window, stride, search)

    tpl = sliding_window_view(prev, (window, window))[rows][:, cols]
    tpl = tpl.reshape(-1, window, window)
    tpl = tpl - tpl.mean(axis=(1, 2), keepdims=True)
    tss = np.einsum("kij,kij->k", tpl, tpl)
    orow = np.repeat(rows, len(cols))
    ocol = np.tile(cols, len(rows))
    keep = tss > VAR_EPS
    tpl, tss, orow, ocol = tpl[keep], tss[keep], orow[keep], ocol[keep]

    win = sliding_window_view(cur, (window, window))
    s1 = win.sum(axis=(2, 3))
    s2 = np.einsum("abij,abij->ab", win, win)
    wvar_all = s2 - s1 * s1 / n

    best = np.zeros(len(tss))
    best_abs = np.full(len(tss), -1.0)
    best_dy = np.zeros(len(tss), dtype=np.intp)
    best_dx = np.zeros(len(tss), dtype=np.intp)
    for dy in range(-search, search + 1):
        r = orow + dy
        rok = (r >= 0) & (r <= h - window)
        for dx in range(-search, search + 1):
            c = ocol + dx
            ok = rok & (c >= 0) & (c <= w - window)
            if not ok.any():
                continue
            rr, cc = r[ok], c[ok]
            cross = np.einsum("kij,kij->k", tpl[ok], win[rr, cc])
            wvar = wvar_all[rr, cc]
            flat = wvar <= VAR_EPS
            val = np.where(flat, 0.0, cross / np.sqrt(tss[ok] * np.where(flat, 1.0, wvar)))
            val = np.clip(val, -1.0, 1.0)
            idx = np.flatnonzero(ok)
            better = np.abs(val) > best_abs[idx] + TIE_EPS
            upd = idx[better]
            best[upd] = val[better]
            best_abs[upd] = np.abs(val[better])
            best_dy[upd] = dy
            best_dx[upd] = dx
    return best, best_dy, best_dx


def build_tree(X, y, weight, presorted, max_depth, min_leaf, mtry, draws):
    """Grow one regression tree in preorder.

    ``presorted`` is the (d, n) stable argsort of ``X`` by column; only its
    ordering convention matters here (ties by ascending row index).
    Returns node arrays (feature, threshold, right, value, gain, weight).
    """
    n, d = X.shape
    active = np.flatnonzero(weight > 0)
    cap = 2 * len(active) + 1
    feature = np.full(cap, -1, dtype=np.intp)
    threshold = np.zeros(cap)
    right = np.full(cap, -1, dtype=np.intp)
    value = np.zeros(cap)
    gain = np.zeros(cap)
    nweight = np.zeros(cap)

    perm = np.empty(d, dtype=np.intp)
    # (samples, depth, parent whose right child this is or -1)
    stack = [(active, 0, -1)]
    n_nodes = 0
    pos = 0
    while stack:
        samples, depth, right_of = stack.pop()
        node = n_nodes
        n_nodes += 1
        if right_of >= 0:
            right[right_of] = node

        o0 = samples[np.argsort(X[samples, 0], kind="stable")]
        w0 = weight[o0]
        cw0 = np.cumsum(w0)
        cs0 = np.cumsum(w0 * y[o0])
        s_w, s_wy = cw0[-1], cs0[-1]
        value[node] = s_wy / s_w
        nweight[node] = s_w
        yn = y[samples]
        if depth >= max_depth or s_w < 2.0 * min_leaf or yn.max() == yn.min():
            continue

        if pos + mtry > len(draws):
            raise RuntimeError("random draw stream exhausted")
        perm[:] = np.arange(d)
        for i in range(mtry):
            j = i + int(draws[pos + i] * (d - i))
            perm[i], perm[j] = perm[j], perm[i]
        pos += mtry

        best_imp = 0.0
        best_f = -1
        best_thr = 0.0
        best_order = None
        best_k = -1
        for f in perm[:mtry]:
            order = samples[np.argsort(X[samples, f], kind="stable")]
            xs = X[order, f]
            ws = weight[order]
            cw = np.cumsum(ws)
            cs = np.cumsum(ws * y[order])
            tw, ts = cw[-1], cs[-1]
            cwv, csv = cw[:-1], cs[:-1]
            valid = (xs[:-1] < xs[1:]) & (cwv >= min_leaf) & ((tw - cwv) >= min_leaf)
            if not valid.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                score = csv * csv / cwv + (ts - csv) * (ts - csv) / (tw - cwv)
            imp = np.where(valid, score - ts * ts / tw, -np.inf)
            k = int(np.argmax(imp))
            if imp[k] > best_imp:
                best_imp = imp[k]
                best_f = int(f)
                best_k = k
                best_order = order
                a, b = xs[k], xs[k + 1]
                thr = a + (b - a) * 0.5
                best_thr = a if thr >= b else thr
        if best_f < 0:
            continue

        feature[node] = best_f
        threshold[node] = best_thr
        gain[node] = best_imp
        stack.append((np.sort(best_order[best_k + 1:]), depth + 1, node))
        stack.append((np.sort(best_order[:best_k + 1]), depth + 1, -1))
    m = n_nodes
    return feature[:m], threshold[:m], right[:m], value[:m], gain[:m], nweight[:m]


def predict_tree(X, feature, threshold, right, value):
    out = np.empty(X.shape[0])
    node = np.zeros(X.shape[0], dtype=np.intp)
    live = np.arange(X.shape[0])
    while live.size:
        nd = node[live]
        f = feature[nd]
        leaf = f < 0
        done = live[leaf]
        out[done] = value[nd[leaf]]
        live, nd, f = live[~leaf], nd[~leaf], f[~leaf]
        go_left = X[live, f] <= threshold[nd]
        node[live] = np.where(go_left, nd + 1, right[nd])
    return out
