# src/fdpv_changepoint/signals/simulate.py
"""
Signal generators.

- Piecewise-mean Gaussian sequences ``x[i] = g(i/N) + sigma * eps[i]``.
- Fractional Gaussian noise by circulant embedding (Davies-Harte).
- Piecewise fractional Brownian motion: per-segment fGn increments, scaled by
  ``dt ** H_k`` and cumulated into one continuous path starting at 0.

Every generator takes an integer seed; identical seed and arguments give
bit-identical output.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from ..core.errors import EmbeddingFailureError, InvalidParameterError
from ..core.types import PiecewiseSpec, TimeSeries, piecewise_mean_function
from ..core.utils import rng_from, split_seed

logger = logging.getLogger(__name__)

EIGENVALUE_TOLERANCE = 1e-8
MAX_EMBEDDING_DOUBLINGS = 3

REFERENCE_MEAN_FRACTIONS = (0.125, 0.25496, 0.43045, 0.70083, 0.82040)
REFERENCE_MEAN_LEVELS = (0.0, 1.0, 0.25, 1.0, 0.5, 1.25)
REFERENCE_HURST_HORIZON = 100_000
REFERENCE_HURST_BOUNDARIES = (12500, 25496, 43045, 70083, 82040)
REFERENCE_HURST_LEVELS = (0.55, 0.67, 0.53, 0.61, 0.70, 0.57)


def reference_mean_spec(n: int = 5000) -> PiecewiseSpec:
    """Five-change piecewise mean with jumps in [0.5, 1.25], rescaled to length `n`."""
    return PiecewiseSpec(tuple(round(f * n) for f in REFERENCE_MEAN_FRACTIONS), REFERENCE_MEAN_LEVELS)


def reference_hurst_spec(t: int = REFERENCE_HURST_HORIZON) -> PiecewiseSpec:
    """Five-change piecewise Hurst configuration, rescaled to horizon `t`."""
    scale = t / REFERENCE_HURST_HORIZON
    return PiecewiseSpec(tuple(round(b * scale) for b in REFERENCE_HURST_BOUNDARIES), REFERENCE_HURST_LEVELS)


# ----------------------------
# Piecewise-mean Gaussian model
# ----------------------------
def simulate_piecewise_gaussian(spec: PiecewiseSpec, n: int, sigma: float, seed: int) -> TimeSeries:
    """
    Independent Gaussian samples with piecewise-constant mean.

    The returned series carries ``known_sigma = sigma`` when sigma > 0.
    """
    if sigma < 0:
        raise InvalidParameterError(f"sigma must be >= 0, got {sigma}.")
    g = piecewise_mean_function(spec, n)
    eps = rng_from(seed).standard_normal(n)
    return TimeSeries(g + sigma * eps, known_sigma=sigma if sigma > 0 else None)


# ----------------------------
# Fractional Gaussian noise
# ----------------------------
def spectral_constant(hurst: float) -> float:
    """C(H) = H * Gamma(2H) * sin(pi H) / pi."""
    return hurst * float(gamma(2.0 * hurst)) * math.sin(math.pi * hurst) / math.pi


def spectral_density(xi: np.ndarray | float, hurst: float) -> np.ndarray:
    """f(xi) = C(H) |xi|^(-2H-1): spectral density of fBm with Var X(t) = |t|^(2H)."""
    return spectral_constant(hurst) * np.abs(np.asarray(xi, dtype=float)) ** (-2.0 * hurst - 1.0)


def fgn_autocovariance(hurst: float, k: np.ndarray | int) -> np.ndarray:
    """gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2."""
    k = np.abs(np.asarray(k, dtype=float))
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1.0) ** h2 - 2.0 * k ** h2 + np.abs(k - 1.0) ** h2)


def circulant_eigenvalues(hurst: float, m: int) -> np.ndarray:
    """Eigenvalues of the 2m x 2m circulant matrix embedding gamma(0..m)."""
    gam = fgn_autocovariance(hurst, np.arange(m + 1))
    row = np.concatenate((gam, gam[-2:0:-1]))
    return np.fft.fft(row).real


def _fgn(hurst: float, n: int, rng: np.random.Generator) -> np.ndarray:
    m = max(int(n), 1)
    for attempt in range(MAX_EMBEDDING_DOUBLINGS + 1):
        lam = circulant_eigenvalues(hurst, m)
        if lam.min() >= -EIGENVALUE_TOLERANCE:
            break
        logger.warning(
            "Circulant embedding of size %d has eigenvalue %.3g for H=%.3f; doubling",
            2 * m, lam.min(), hurst,
        )
        m *= 2
    else:
        raise EmbeddingFailureError(
            f"Negative circulant eigenvalues for H={hurst} after {MAX_EMBEDDING_DOUBLINGS} doublings."
        )

    size = 2 * m
    lam = np.clip(lam, 0.0, None)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    y = np.fft.fft(np.sqrt(lam / size) * z)
    return y.real[:n]


def simulate_fgn(hurst: float, n: int, seed: int) -> np.ndarray:
    """
    Unit-variance fractional Gaussian noise of length `n` with Hurst index `hurst`.

    Exact covariance via circulant embedding, O(n log n).

    Raises
    ------
    InvalidParameterError
        If hurst is outside (0, 1) or n < 1.
    EmbeddingFailureError
        If the embedding stays indefinite after the allowed doublings.
    """
    if not 0.0 < hurst < 1.0:
        raise InvalidParameterError(f"Hurst index must lie in (0, 1), got {hurst}.")
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}.")
    return _fgn(float(hurst), int(n), rng_from(seed))


# ----------------------------
# Piecewise fractional Brownian motion
# ----------------------------
@dataclass(frozen=True, eq=False)
class HurstProcess:
    """Path X(t_i), t_i = i, with X(0) = 0 and piecewise-constant Hurst index."""

    values: np.ndarray
    spec: PiecewiseSpec
    dt: float

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def as_series(self) -> TimeSeries:
        return TimeSeries(self.values)


def simulate_piecewise_fbm(
    spec: PiecewiseSpec, t: int, seed: int, dt: float = 1.0
) -> HurstProcess:
    """
    Continuous path whose increments on segment k are ``dt**H_k`` times an
    independent unit-variance fGn with Hurst index H_k.

    The default ``dt=1`` gives unit-variance increments. ``dt=1/t`` observes an
    fBm on the unit interval, which is what the wavelet pipeline expects.
    """
    spec.check(t).check_hurst()
    step = float(dt)
    if not step > 0:
        raise InvalidParameterError(f"dt must be > 0, got {dt}.")

    edges = spec.edges(t)
    pieces = []
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        h = spec.levels[k]
        pieces.append(step ** h * simulate_fgn(h, int(hi - lo), split_seed(seed, k)))
    inc = np.concatenate(pieces)

    path = np.empty(t, dtype=float)
    path[0] = 0.0
    np.cumsum(inc[:-1], out=path[1:])
    path.setflags(write=False)
    return HurstProcess(values=path, spec=spec, dt=step)
