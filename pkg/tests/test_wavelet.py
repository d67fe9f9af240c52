# tests/test_wavelet.py
import math

import numpy as np
import pytest

from fdpv_changepoint.core.errors import InvalidParameterError, QuadratureFailureError
from fdpv_changepoint.core.types import PiecewiseSpec
from fdpv_changepoint.signals.simulate import simulate_piecewise_fbm
from fdpv_changepoint.signals.wavelet import (
    LOG_CHI2_MEAN,
    LOG_CHI2_VARIANCE,
    Wavelet,
    WaveletSeries,
    build_wavelet,
    dilated_taps,
    log_square_series,
    pipeline_params,
    spectral_moment,
    theoretical_level,
    wavelet_coefficients,
    wavelet_variance,
)


@pytest.fixture(scope="module")
def db6() -> Wavelet:
    return build_wavelet("daubechies-6")


def test_build_wavelet(db6):
    assert db6.name == "daubechies-6"
    assert db6.vanishing_moments == 6
    assert db6.support == (0.0, 11.0)
    assert db6.grid[-1] == pytest.approx(11.0)
    assert db6.energy() == pytest.approx(1.0, abs=1e-3)
    assert db6.spectral_energy() == pytest.approx(db6.energy(), rel=1e-9)
    assert not db6.psi.flags.writeable


def test_wavelet_name_aliases():
    assert build_wavelet("db4", 2**8).name == build_wavelet("Daubechies-4", 2**8).name == "daubechies-4"


def test_resolution_floor():
    with pytest.raises(InvalidParameterError):
        build_wavelet("daubechies-6", 2**7)


def test_interpolation_is_zero_outside_support(db6):
    assert db6(np.array([-1.0, 12.0])).tolist() == [0.0, 0.0]


@pytest.mark.parametrize("degree", range(6))
def test_taps_annihilate_low_degree_polynomials(db6, degree):
    t = np.arange(1500.0) / 100.0
    x = np.polynomial.polynomial.polyval(t, np.linspace(1.0, 2.0, degree + 1))
    taps = dilated_taps(db6, 5.0)
    d = wavelet_coefficients(x, db6, 5.0).coefficients
    assert np.max(np.abs(d)) / (np.max(np.abs(x)) * np.sum(np.abs(taps))) < 1e-6


def test_coefficient_bookkeeping(db6, rng):
    x = np.cumsum(rng.normal(size=400))
    ws = wavelet_coefficients(x, db6, 5.0)
    taps = dilated_taps(db6, 5.0)
    assert taps.size == 56
    assert ws.coefficients.size == 400 - taps.size + 1
    assert ws.shifts[0] == 0 and np.all(np.diff(ws.shifts) == 1)
    assert ws.coefficients[3] == pytest.approx(float(np.dot(taps, x[3:3 + taps.size])))
    assert not ws.degenerate.any()
    ys = log_square_series(ws)
    assert ys.n == ws.coefficients.size
    np.testing.assert_allclose(ys.values, ws.log_squares)
    assert ys.scale == 5.0 and ys.known_sigma is None


def test_scale_below_one(db6):
    with pytest.raises(InvalidParameterError):
        wavelet_coefficients(np.zeros(100), db6, 0.5)


def test_log_square_series_drops_degenerate():
    ws = WaveletSeries(
        scale=2.0,
        wavelet="daubechies-6",
        support=(0.0, 11.0),
        shifts=np.arange(5),
        coefficients=np.array([1.0, 0.0, 2.0, 0.0, 3.0]),
        degenerate=np.array([False, True, False, True, False]),
    )
    ys = log_square_series(ws)
    assert ys.shifts.tolist() == [0, 2, 4]
    np.testing.assert_allclose(ys.values, np.log([1.0, 4.0, 9.0]))
    assert np.isnan(ws.log_squares[1])


def test_log_chi2_moments():
    y = np.log(np.random.default_rng(99).standard_normal(100_000) ** 2)
    assert LOG_CHI2_MEAN == pytest.approx(-1.2704, abs=1e-4)
    assert LOG_CHI2_VARIANCE == pytest.approx(4.9348, abs=1e-4)
    assert y.mean() == pytest.approx(LOG_CHI2_MEAN, abs=0.05)
    assert y.var() == pytest.approx(LOG_CHI2_VARIANCE, rel=0.05)


def test_wavelet_variance_scaling(db6):
    for h in (0.55, 0.7):
        ratio = wavelet_variance(h, 10.0, db6) / wavelet_variance(h, 5.0, db6)
        assert ratio == pytest.approx(2 ** (2 * h + 1), rel=1e-12)
        shift = theoretical_level(h, 5.0, db6, dt=1e-3) - theoretical_level(h, 5.0, db6)
        assert shift == pytest.approx(2 * h * math.log(1e-3), rel=1e-12)


def test_spectral_moment_is_positive(db6):
    assert spectral_moment(db6, 0.3) > spectral_moment(db6, 0.8) > 0


def test_quadrature_failure_detected():
    freqs = np.linspace(0.0, 10.0, 41)
    table = np.zeros_like(freqs)
    table[2::2] = 1.0
    w = Wavelet(
        name="broken",
        grid=np.linspace(0.0, 1.0, 5),
        psi=np.zeros(5),
        support=(0.0, 1.0),
        vanishing_moments=1,
        frequencies=freqs,
        psi_hat_sq=table,
    )
    with pytest.raises(QuadratureFailureError):
        spectral_moment(w, 0.5)


def test_empirical_variance_matches_quadrature(db6):
    hurst, scale = 0.7, 16.0
    spec = PiecewiseSpec((), (hurst,))
    variances = [
        np.var(wavelet_coefficients(simulate_piecewise_fbm(spec, 2**15, seed=s, dt=1.0), db6, scale).coefficients)
        for s in range(8)
    ]
    assert np.mean(variances) == pytest.approx(wavelet_variance(hurst, scale, db6), rel=0.1)


def test_level_separation_on_unit_interval(db6):
    t = 20_000
    low = theoretical_level(0.55, 5.0, db6, dt=1.0 / t)
    high = theoretical_level(0.7, 5.0, db6, dt=1.0 / t)
    assert low - high > 2.0


def test_pipeline_params_defaults():
    p = pipeline_params()
    assert (p.window, p.alpha_critic) == (500, 1e-11)
    q = pipeline_params(window=200, kmax=4)
    assert (q.window, q.kmax, q.alpha_critic) == (200, 4, 1e-11)
    assert pipeline_params(alpha_critic=1e-3).alpha_critic == 1e-3
