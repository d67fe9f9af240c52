# src/fdpv_changepoint/signals/wavelet.py
"""
Continuous-wavelet coefficient pipeline.

For a fixed scale a, ``d(a, b) = a^{-1/2} * sum_t psi((t - b)/a) * x[t]`` over
the shifts b whose dilated support lies inside the observation window. For a
path with piecewise-constant Hurst index, ``Y_b = log d(a, b)^2`` has a
piecewise-constant mean plus ln(chi2_1) noise, which the FDpV detector can
segment.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import pywt
from scipy.integrate import simpson
from scipy.signal import correlate

from ..core.errors import (
    AllDegenerateError,
    InvalidParameterError,
    QuadratureFailureError,
    ScaleTooLargeError,
    UnsupportedWaveletError,
)
from ..core.types import FdpvParams, TimeSeries
from .simulate import HurstProcess, spectral_constant

logger = logging.getLogger(__name__)

DEFAULT_WAVELET = "daubechies-6"
DEFAULT_RESOLUTION = 2**10
MIN_RESOLUTION = 2**8

#: Analysis frequency 1/a and FDpV settings for log-squared coefficient series.
DEFAULT_FREQUENCY = 0.2
PIPELINE_WINDOW = 500
PIPELINE_ALPHA = 1e-11

#: E[ln U^2] and Var[ln U^2] for U ~ N(0, 1).
LOG_CHI2_MEAN = -float(np.euler_gamma) - math.log(2.0)
LOG_CHI2_VARIANCE = math.pi**2 / 2.0

#: |d| below this fraction of max|x| * sum|taps| counts as an exact zero.
DEGENERATE_TOLERANCE = 1e-10
QUADRATURE_RTOL = 1e-3

_NAME = re.compile(r"^(?:daubechies-|db)(\d+)$")


@dataclass(frozen=True, eq=False)
class Wavelet:
    """
    Sampled mother wavelet on its support [L1, L2] plus |psi_hat|^2 on a
    one-sided angular-frequency grid (psi_hat(w) = int psi(t) e^{-iwt} dt).
    """

    name: str
    grid: np.ndarray
    psi: np.ndarray
    support: tuple[float, float]
    vanishing_moments: int
    frequencies: np.ndarray
    psi_hat_sq: np.ndarray

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """psi(u), zero outside the support."""
        return np.interp(u, self.grid, self.psi, left=0.0, right=0.0)

    def energy(self) -> float:
        """Time-domain energy sum |psi|^2 dt."""
        return float(np.sum(self.psi**2) * self.step)

    def spectral_energy(self) -> float:
        """(1/2pi) int |psi_hat|^2 dw over the full line, from the one-sided table."""
        weights = np.full(self.psi_hat_sq.shape, 2.0)
        weights[0] = 1.0
        weights[-1] = 1.0
        dw = float(self.frequencies[1] - self.frequencies[0])
        return float(np.sum(weights * self.psi_hat_sq) * dw / (2.0 * math.pi))


def build_wavelet(name: str = DEFAULT_WAVELET, grid_resolution: int = DEFAULT_RESOLUTION) -> Wavelet:
    """
    Sample a Daubechies mother wavelet by the cascade algorithm.

    Parameters
    ----------
    name : str
        "daubechies-N" or "dbN".
    grid_resolution : int
        Points per unit of support, at least 2**8 (rounded up to a power of 2).

    Raises
    ------
    UnsupportedWaveletError
        Unknown wavelet name.
    InvalidParameterError
        Resolution below 2**8.
    """
    match = _NAME.match(name.strip().lower())
    pyname = f"db{match.group(1)}" if match else None
    if pyname is None or pyname not in pywt.wavelist(family="db"):
        raise UnsupportedWaveletError(f"Unsupported wavelet: {name!r}")
    if grid_resolution < MIN_RESOLUTION:
        raise InvalidParameterError(f"grid_resolution must be >= {MIN_RESOLUTION}, got {grid_resolution}.")

    level = int(math.ceil(math.log2(grid_resolution)))
    w = pywt.Wavelet(pyname)
    _, psi, x = w.wavefun(level=level)
    length = float(w.dec_len - 1)
    inside = x <= length + 0.5 / 2**level
    grid = np.asarray(x[inside], dtype=float)
    psi = np.asarray(psi[inside], dtype=float)

    step = float(grid[1] - grid[0])
    n_fft = 1 << int(math.ceil(math.log2(16 * psi.size)))
    psi_hat = step * np.fft.rfft(psi, n=n_fft)
    freqs = 2.0 * math.pi * np.fft.rfftfreq(n_fft, d=step)

    for arr in (grid, psi, freqs):
        arr.setflags(write=False)
    psi_hat_sq = np.abs(psi_hat) ** 2
    psi_hat_sq.setflags(write=False)

    return Wavelet(
        name=f"daubechies-{w.vanishing_moments_psi}",
        grid=grid,
        psi=psi,
        support=(float(grid[0]), float(grid[0]) + length),
        vanishing_moments=int(w.vanishing_moments_psi),
        frequencies=freqs,
        psi_hat_sq=psi_hat_sq,
    )


# ----------------------------
# Coefficients
# ----------------------------
def dilated_taps(w: Wavelet, scale: float) -> np.ndarray:
    """
    Discrete filter ``a^{-1/2} psi(m/a + L1)`` for m = 0 .. floor(a (L2 - L1)),
    projected so that it annihilates polynomials of degree below the number
    of vanishing moments.
    """
    l1, l2 = w.support
    m = np.arange(int(math.floor(scale * (l2 - l1))) + 1, dtype=float)
    taps = w(l1 + m / scale) / math.sqrt(scale)

    half = max(m[-1] / 2.0, 1.0)
    u = (m - m[-1] / 2.0) / half
    basis = np.vander(u, N=min(w.vanishing_moments, m.size - 1), increasing=True)
    coef, *_ = np.linalg.lstsq(basis, taps, rcond=None)
    return taps - basis @ coef


@dataclass(frozen=True, eq=False)
class WaveletSeries:
    """Coefficients d(a, b_i) at unit-spaced shifts b_i, with degenerate (zero) entries flagged."""

    scale: float
    wavelet: str
    support: tuple[float, float]
    shifts: np.ndarray
    coefficients: np.ndarray
    degenerate: np.ndarray

    @property
    def log_squares(self) -> np.ndarray:
        """log d^2, NaN where the coefficient is flagged."""
        out = np.full(self.coefficients.shape, np.nan)
        ok = ~self.degenerate
        out[ok] = np.log(self.coefficients[ok] ** 2)
        return out


def _path_values(path: HurstProcess | TimeSeries | np.ndarray) -> np.ndarray:
    if isinstance(path, (HurstProcess, TimeSeries)):
        return path.values
    return np.asarray(path, dtype=float)


def wavelet_coefficients(
    path: HurstProcess | TimeSeries | np.ndarray, w: Wavelet, scale: float
) -> WaveletSeries:
    """
    Wavelet coefficients of `path` at `scale` over every interior shift.

    Raises
    ------
    InvalidParameterError
        scale < 1.
    ScaleTooLargeError
        The dilated support is longer than the path.
    """
    if not scale >= 1.0:
        raise InvalidParameterError(f"scale must be >= 1, got {scale}.")
    x = _path_values(path)
    taps = dilated_taps(w, scale)
    if taps.size > x.size:
        raise ScaleTooLargeError(
            f"Dilated support of {taps.size} samples exceeds the path length {x.size}."
        )

    d = correlate(x, taps, mode="valid")
    floor = DEGENERATE_TOLERANCE * float(np.max(np.abs(x), initial=0.0)) * float(np.sum(np.abs(taps)))
    degenerate = np.abs(d) <= floor
    shifts = np.arange(d.size) - int(round(scale * w.support[0]))
    logger.debug("scale=%.3g taps=%d shifts=%d degenerate=%d", scale, taps.size, d.size, int(degenerate.sum()))
    return WaveletSeries(
        scale=float(scale),
        wavelet=w.name,
        support=w.support,
        shifts=shifts,
        coefficients=d,
        degenerate=degenerate,
    )


@dataclass(frozen=True, eq=False)
class LogSquareSeries(TimeSeries):
    """Y_i = log d(a, b_i)^2 with the original shift of every retained sample."""

    shifts: Optional[np.ndarray] = None
    scale: float = 1.0
    wavelet: str = DEFAULT_WAVELET
    noise_mean: float = LOG_CHI2_MEAN
    noise_variance: float = LOG_CHI2_VARIANCE


def log_square_series(ws: WaveletSeries) -> LogSquareSeries:
    """
    Log-squared coefficient series with degenerate entries dropped.

    Raises
    ------
    AllDegenerateError
        Every coefficient is (numerically) zero.
    """
    keep = ~ws.degenerate
    if not keep.any():
        raise AllDegenerateError("Every wavelet coefficient is zero at this scale.")
    dropped = int(ws.degenerate.sum())
    if dropped:
        logger.warning("Dropping %d zero wavelet coefficients", dropped)
    shifts = ws.shifts[keep].copy()
    shifts.setflags(write=False)
    return LogSquareSeries(
        values=np.log(ws.coefficients[keep] ** 2),
        shifts=shifts,
        scale=ws.scale,
        wavelet=ws.wavelet,
    )


# ----------------------------
# Theoretical moments
# ----------------------------
def spectral_moment(w: Wavelet, hurst: float) -> float:
    """
    J(H) = int_R |psi_hat(x)|^2 |x|^{-2H-1} dx by Simpson quadrature on the
    tabulated grid, checked against the half-resolution grid.

    Raises
    ------
    QuadratureFailureError
        The two resolutions disagree by more than `QUADRATURE_RTOL`.
    """
    x = w.frequencies[1:]
    y = w.psi_hat_sq[1:] * x ** (-2.0 * hurst - 1.0)
    fine = simpson(y, x=x)
    coarse = simpson(y[::2], x=x[::2])
    if not (math.isfinite(fine) and fine > 0 and abs(fine - coarse) <= QUADRATURE_RTOL * fine):
        raise QuadratureFailureError(
            f"Quadrature did not converge for H={hurst}: {fine!r} vs {coarse!r}."
        )
    return 2.0 * float(fine)


def wavelet_variance(hurst: float, scale: float, w: Wavelet, dt: float = 1.0) -> float:
    """
    I(a) = int |psi_hat(x)|^2 f(x/a) dx = C(H) a^{2H+1} J(H), times dt^{2H}
    for a path whose increments are scaled by dt^H.
    """
    if not 0.0 < hurst < 1.0:
        raise InvalidParameterError(f"Hurst index must lie in (0, 1), got {hurst}.")
    if not scale > 0:
        raise InvalidParameterError(f"scale must be > 0, got {scale}.")
    return dt ** (2.0 * hurst) * spectral_constant(hurst) * scale ** (2.0 * hurst + 1.0) * spectral_moment(w, hurst)


def theoretical_level(hurst: float, scale: float, w: Wavelet, dt: float = 1.0) -> float:
    """Expected value of Y = log d^2 inside a segment of Hurst index `hurst`."""
    return math.log(wavelet_variance(hurst, scale, w, dt)) + LOG_CHI2_MEAN


def pipeline_params(
    window: Optional[int] = None, alpha_critic: Optional[float] = None, **kwargs: Any
) -> FdpvParams:
    """FDpV parameters for a log-squared series, with `PIPELINE_WINDOW` and `PIPELINE_ALPHA` as defaults."""
    return FdpvParams(
        window=PIPELINE_WINDOW if window is None else window,
        alpha_critic=PIPELINE_ALPHA if alpha_critic is None else alpha_critic,
        **kwargs,
    )
