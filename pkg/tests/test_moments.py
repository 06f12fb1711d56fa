import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from texrd.features.moments import histogram_entropy, sample_std, stat_moments


def test_against_scipy(rng):
    x = rng.gamma(2.0, size=500)
    m = stat_moments(x)
    assert m.mean == pytest.approx(x.mean(), abs=1e-12)
    assert m.std == pytest.approx(np.std(x, ddof=1), rel=1e-12)
    assert m.skewness == pytest.approx(stats.skew(x), rel=1e-10)
    assert m.kurtosis == pytest.approx(stats.kurtosis(x, fisher=False), rel=1e-10)
    assert not m.degenerate


def test_constant_population():
    m = stat_moments(np.full(10, 3.5))
    assert (m.mean, m.std, m.skewness, m.kurtosis, m.entropy) == (3.5, 0.0, 0.0, 0.0, 0.0)
    assert m.degenerate


def test_entropy_uniform_bins():
    # one value in each of 4 equal bins -> 2 bits
    assert histogram_entropy([0.1, 0.3, 0.6, 0.9], 4, (0.0, 1.0)) == pytest.approx(2.0)
    # values outside the range are clipped into the edge bins
    assert histogram_entropy([-5.0, 5.0], 2, (0.0, 1.0)) == pytest.approx(1.0)
    assert histogram_entropy([], 4, (0, 1)) == 0.0


def test_single_value_and_empty():
    assert sample_std([2.0]) == 0.0
    with pytest.raises(ValueError):
        stat_moments([])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=50),
       st.floats(-100, 100), st.floats(0.1, 10))
def test_affine_invariance(values, shift, scale):
    x = np.array(values)
    a, b = stat_moments(x), stat_moments(x * scale + shift)
    assert b.mean == pytest.approx(a.mean * scale + shift, abs=1e-6 * (1 + abs(shift) + abs(a.mean) * scale))
    assert b.std == pytest.approx(a.std * scale, rel=1e-6, abs=1e-9)
    if not (a.degenerate or b.degenerate):
        assert b.skewness == pytest.approx(a.skewness, abs=1e-5)
        assert b.kurtosis == pytest.approx(a.kurtosis, rel=1e-5)
    assert b.kurtosis >= 0 and math.isfinite(b.entropy)
