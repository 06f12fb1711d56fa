"""The compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from texrd import _pykernels as py
from texrd import kernels

try:
    from texrd import _ckernels as cy
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def test_dispatch_reports_implementation():
    assert kernels.IMPL in ("cython", "python")
    if cy is not None and kernels.IMPL == "cython":
        assert kernels.build_tree is cy.build_tree


@needs_ext
def test_glcm_parity(rng):
    q = rng.integers(0, 32, (40, 33)).astype(np.uint8)
    for off in [(0, 1), (1, 0), (-2, 3), (3, -1)]:
        np.testing.assert_array_equal(cy.glcm_counts(q, 32, *off), py.glcm_counts(q, 32, *off))


@needs_ext
def test_ncc_parity(rng):
    a = rng.integers(0, 256, (64, 72)).astype(float)
    b = np.roll(a, 2, axis=1) + rng.normal(0, 5, a.shape)
    b[:16, :16] = 7.0  # flat region
    pc, dyc, dxc = cy.ncc_peaks(a, b, 16, 12, 6)
    pp, dyp, dxp = py.ncc_peaks(a, b, 16, 12, 6)
    np.testing.assert_allclose(pc, pp, atol=1e-9)
    np.testing.assert_array_equal(dyc, dyp)
    np.testing.assert_array_equal(dxc, dxp)


def _tree_inputs(rng, n=300, d=7):
    X = rng.normal(size=(n, d))
    X[:, 3] = rng.integers(0, 4, n)  # many ties
    y = X[:, 0] * 2 + np.sin(X[:, 1]) + 0.1 * rng.normal(size=n)
    w = np.bincount(rng.integers(0, n, n), minlength=n).astype(float)
    presorted = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T, dtype=np.intp)
    draws = rng.random(3 * (2 * n + 1))
    return X, y, w, presorted, draws


@needs_ext
@pytest.mark.parametrize("depth,min_leaf", [(1, 1), (4, 5), (16, 1), (16, 5)])
def test_tree_bit_identical(rng, depth, min_leaf):
    X, y, w, ps, draws = _tree_inputs(rng)
    tc = cy.build_tree(X, y, w, ps, depth, float(min_leaf), 3, draws)
    tp = py.build_tree(X, y, w, ps, depth, float(min_leaf), 3, draws)
    for a, b in zip(tc, tp):
        np.testing.assert_array_equal(np.asarray(a), np.asarray(b))
    Xt = rng.normal(size=(50, X.shape[1]))
    np.testing.assert_array_equal(cy.predict_tree(Xt, *tc[:3], tc[3]),
                                  py.predict_tree(Xt, *tp[:3], tp[3]))


@pytest.mark.parametrize("mod", [py] + ([cy] if cy is not None else []))
def test_draw_stream_exhaustion(rng, mod):
    X, y, w, ps, _ = _tree_inputs(rng, n=50)
    with pytest.raises(RuntimeError, match="exhausted"):
        mod.build_tree(X, y, w, ps, 8, 1.0, 3, np.zeros(2))


@pytest.mark.parametrize("mod", [py] + ([cy] if cy is not None else []))
def test_tree_structure(rng, mod):
    X, y, w, ps, draws = _tree_inputs(rng)
    feature, thr, right, value, gain, nw = (np.asarray(a) for a in mod.build_tree(X, y, w, ps, 6, 5.0, 3, draws))
    internal = np.flatnonzero(feature >= 0)
    assert np.all(right[internal] > internal + 1)
    assert np.all(gain[internal] > 0)
    # children weights add up to the parent's
    for i in internal:
        assert nw[i + 1] + nw[right[i]] == pytest.approx(nw[i])
    assert np.all(nw[feature < 0] >= 5.0)


@needs_ext
def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--repeat", "1"]) == 0
    assert "build_tree" in capsys.readouterr().out
