import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import smooth_texture
from texrd.features.pyramid import blur, laplacian_pyramid, nlp_distance, pyr_up

K = np.array([1, 4, 6, 4, 1]) / 16


def _mirror(i, n):
    # reflect about the edge samples: -1 -> 1, n -> n - 2
    while i < 0 or i >= n:
        i = -i if i < 0 else 2 * (n - 1) - i
    return i


def blur_oracle(x):
    h, w = x.shape
    out = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            out[r, c] = sum(K[a] * K[b] * x[_mirror(r + a - 2, h), _mirror(c + b - 2, w)]
                            for a in range(5) for b in range(5))
    return out


@settings(max_examples=20, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(3, 12)), elements=st.floats(0, 255)))
def test_blur_matches_direct_convolution(x):
    np.testing.assert_allclose(blur(x), blur_oracle(x), atol=1e-9)


def test_pyramid_collapses_exactly(rng):
    x = rng.random((64, 48)) * 255
    bands = laplacian_pyramid(x, 4)
    assert [b.shape for b in bands] == [(64, 48), (32, 24), (16, 12), (8, 6)]
    rec = bands[-1]
    for band in reversed(bands[:-1]):
        rec = band + pyr_up(rec, band.shape)
    np.testing.assert_allclose(rec, x, atol=1e-9)


def test_nlp_identity_symmetry_and_growth():
    a = smooth_texture((64, 64), seed=1)
    b = np.roll(a, 1, axis=1)
    c = smooth_texture((64, 64), seed=2)
    assert nlp_distance(a, a) == 0.0
    assert nlp_distance(a, b) == pytest.approx(nlp_distance(b, a), abs=1e-12)
    assert 0 < nlp_distance(a, b) < nlp_distance(a, c)


def test_nlp_flat_frames_zero():
    f = np.full((32, 32), 50.0)
    assert nlp_distance(f, f) == 0.0


def test_nlp_argument_checks():
    with pytest.raises(ValueError):
        nlp_distance(np.zeros((8, 8)), np.zeros((8, 9)))
    with pytest.raises(ValueError):
        nlp_distance(np.zeros((8, 8)), np.zeros((8, 8)), scales=4)
