from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rel_err():
    def f(value, ref, floor=1e-300):
        return abs(value - ref) / max(abs(ref), floor)
    return f


@pytest.fixture
def line_grid():
    from fracdiffusive.spectral_kernels import SpatialGrid
    return SpatialGrid(1, 256, 40.0)


def power_law_series(exponent: float, t):
    return (1.0 + np.asarray(t, float)) ** exponent


