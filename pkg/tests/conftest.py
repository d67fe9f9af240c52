# tests/conftest.py

import numpy as np
import pytest

from fdpv_changepoint.core.types import TimeSeries
from fdpv_changepoint.signals.simulate import reference_mean_spec, simulate_piecewise_gaussian


@pytest.fixture
def step_series() -> TimeSeries:
    """Noiseless single step of height 1 at index 50, N = 100."""
    return TimeSeries(np.r_[np.zeros(50), np.ones(50)])


@pytest.fixture(scope="session")
def reference_sample() -> TimeSeries:
    """One seeded replication of the five-change mean model (N=5000, sigma=1)."""
    return simulate_piecewise_gaussian(reference_mean_spec(5000), 5000, 1.0, seed=7)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
