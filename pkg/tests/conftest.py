import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

sys.path.insert(0, str(Path(__file__).parent))


def smooth_texture(shape=(128, 128), sigma=2.0, seed=0, lo=20, hi=220):
    """Periodic band-limited texture scaled to [lo, hi] (float)."""
    rng = np.random.default_rng(seed)
    base = gaussian_filter(rng.normal(size=shape), sigma, mode="wrap")
    return (base - base.min()) / np.ptp(base) * (hi - lo) + lo


@pytest.fixture
def texture():
    return smooth_texture()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
