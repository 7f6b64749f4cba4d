import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bo2d import Grid2D, transform
from bo2d.inequalities import random_smooth_field

settings.register_profile(
    "bo2d", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("bo2d")


def rel(a, b) -> float:
    """Relative max-abs difference, 0 when both vanish."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.abs(a).max(), np.abs(b).max())
    return 0.0 if scale == 0 else float(np.abs(a - b).max() / scale)


def bandlimited(grid: Grid2D, seed: int, band: int = 3, zero_xmean: bool = False):
    """Real field with only |j|, |k| ≤ band modes, random amplitudes."""
    rng = np.random.default_rng(seed)
    X, Y = grid.mesh()
    v = np.zeros(grid.shape)
    for j in range(0 if not zero_xmean else 1, band + 1):
        for k in range(-band, band + 1):
            a, b = rng.normal(size=2)
            arg = j * math.pi * X / grid.Lx + k * math.pi * Y / grid.Ly
            v += a * np.cos(arg) + b * np.sin(arg)
    return transform(v, grid)


@pytest.fixture
def grid32():
    return Grid2D(32, 32, math.pi, math.pi)


@pytest.fixture
def smooth32(grid32):
    return random_smooth_field(7, grid32, 4.0)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
