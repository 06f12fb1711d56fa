import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import smooth_texture
from oracles import ncc_bruteforce
from texrd.features.ncc import ncc_peak_stats, ncc_peaks


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, (16, 16)), arrays(np.uint8, (16, 16)),
       st.integers(2, 6), st.integers(1, 5), st.integers(0, 3))
def test_matches_dense_bruteforce(prev, cur, window, stride, search):
    peaks, _, _ = ncc_peaks(prev, cur, window, stride, search)
    ref = ncc_bruteforce(prev, cur, window, stride, search)
    assert peaks.shape == ref.shape
    np.testing.assert_allclose(peaks, ref, atol=1e-9, rtol=0)


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, (24, 20)), arrays(np.uint8, (24, 20)))
def test_peaks_bounded(prev, cur):
    peaks, dy, dx = ncc_peaks(prev, cur, 6, 4, 3)
    assert np.all(np.abs(peaks) <= 1.0)
    assert np.all(np.abs(dy) <= 3) and np.all(np.abs(dx) <= 3)


def test_self_match_and_negation():
    f = smooth_texture((96, 96), seed=3)
    m = ncc_peak_stats(f, f)
    assert m.mean == pytest.approx(1.0, abs=1e-6)
    assert m.std == pytest.approx(0.0, abs=1e-6)
    neg = ncc_peak_stats(f, 255.0 - f)
    assert neg.mean == pytest.approx(-1.0, abs=1e-6)


def test_translation_recovered():
    f = smooth_texture((96, 96), seed=4)
    peaks, dy, dx = ncc_peaks(f, np.roll(f, (2, -3), axis=(0, 1)), 16, 16, 8)
    np.testing.assert_allclose(peaks, 1.0, atol=1e-9)
    assert np.all(dy == 2) and np.all(dx == -3)


def test_intensity_shift_invariance(rng):
    a = rng.integers(0, 200, (48, 48)).astype(float)
    b = rng.integers(0, 200, (48, 48)).astype(float)
    m1 = ncc_peak_stats(a, b, 8, 8, 4)
    m2 = ncc_peak_stats(a + 37.0, b + 37.0, 8, 8, 4)
    np.testing.assert_allclose(m1.as_tuple(), m2.as_tuple(), atol=1e-6)


def test_flat_frames():
    flat = np.full((32, 32), 9.0)
    peaks, _, _ = ncc_peaks(flat, flat, 8, 8, 2)
    assert peaks.size == 0
    with pytest.raises(ValueError, match="undefined"):
        ncc_peak_stats(flat, flat, 8, 8, 2)
    # textured template against a flat frame scores 0
    tex = smooth_texture((32, 32))
    peaks, _, _ = ncc_peaks(tex, flat, 8, 8, 2)
    assert np.all(peaks == 0.0)


def test_argument_checks():
    a = np.zeros((8, 8))
    with pytest.raises(ValueError):
        ncc_peaks(a, np.zeros((8, 9)))
    with pytest.raises(ValueError):
        ncc_peaks(a, a, window=9)
    with pytest.raises(ValueError):
        ncc_peaks(a, a, window=4, stride=0)


def test_equal_magnitude_tie_keeps_first_offset():
    # +0.125 and -0.125 candidates differ only by round-off; scan order decides
    prev = np.zeros((16, 16), np.uint8)
    prev[7, 1] = 1
    cur = np.ones((16, 16), np.uint8)
    cur[4, 0] = 0
    cur[7, 3] = 2
    for impl in (ncc_peaks, ncc_bruteforce):
        out = impl(prev, cur, 3, 1, 1)
        peaks = out[0] if isinstance(out, tuple) else out
        np.testing.assert_allclose(peaks, ncc_bruteforce(prev, cur, 3, 1, 1), atol=1e-9)
