"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the median wall-clock per call for each kernel and the speed-up.
"""

import argparse
import statistics
import time

import numpy as np

from texrd import _pykernels as py

try:
    from texrd import _ckernels as cy
except ImportError:
    cy = None


def _median_time(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def cases(rng):
    frame = rng.integers(0, 256, (240, 320)).astype(np.float64)
    nxt = np.roll(frame, 2, axis=1) + rng.normal(0, 4, frame.shape)
    q = (frame.astype(np.int64) * 32 // 256).astype(np.uint8)

    n, d, mtry = 2300, 14, 5
    X = rng.normal(size=(n, d))
    y = X[:, 0] * 3 + np.sin(X[:, 1]) + rng.normal(0, 0.1, n)
    w = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
    presorted = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T, dtype=np.intp)
    draws = rng.random(mtry * (2 * n + 1))

    def tree_args():
        return (X, y, w, presorted, 16, 5.0, mtry, draws)

    tree = py.build_tree(*tree_args())
    feature, threshold, right, value = (np.asarray(a) for a in tree[:4])
    return {
        "glcm_counts 240x320": lambda m: m.glcm_counts(q, 32, 0, 1),
        "ncc_peaks 240x320 w16 s8": lambda m: m.ncc_peaks(frame, nxt, 16, 16, 8),
        "build_tree 2300x14": lambda m: m.build_tree(*tree_args()),
        "predict_tree 2300 rows": lambda m: m.predict_tree(X, feature, threshold, right, value),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'python ms':>10s} {'cython ms':>10s} {'speed-up':>9s}")
    for name, call in cases(rng).items():
        tp = _median_time(lambda: call(py), args.repeat)
        tc = _median_time(lambda: call(cy), args.repeat)
        print(f"{name:28s} {tp * 1e3:10.2f} {tc * 1e3:10.2f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
