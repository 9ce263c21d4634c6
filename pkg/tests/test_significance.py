import numpy as np
import pytest

import oracles
from wavecomove.coherence import wtc, xwt
from wavecomove.cwt import WaveletParams, cwt
from wavecomove.errors import ConfigError
from wavecomove.ingest import AR1Params, TimeSeries, fit_ar1, simulate_ar1
from wavecomove.significance import (Method, generate_surrogate, monte_carlo_thresholds,
                                     power_significance, power_thresholds, red_noise_spectrum,
                                     significant_fraction, wtc_mask, wtc_significance, xwt_mask)

N = 304
PARAMS = WaveletParams().resolved(N)


@pytest.fixture(scope="module")
def thresholds():
    ar = AR1Params(0.5, 1.0)
    return monte_carlo_thresholds(PARAMS, ar, ar, N, n_surrogates=300, rng_seed=42)


def test_red_noise_spectrum():
    assert np.all(red_noise_spectrum(0.0, np.arange(50), 100) == 1.0)
    assert red_noise_spectrum(0.72, 0, 304) == pytest.approx(oracles.red_noise(0.72, 0, 304), rel=1e-12)
    assert red_noise_spectrum(0.72, 0, 304) == pytest.approx(6.1429, abs=1e-4)
    k = np.arange(1, 153)
    assert np.all(np.diff(red_noise_spectrum(0.4, k, 304)) < 0)


def test_power_thresholds_formula():
    s = TimeSeries("x", 0, np.random.default_rng(0).normal(size=N))
    f = cwt(s, PARAMS)
    ar = AR1Params(0.3, 1.0)
    k = N / f.periods
    expected = [f.variance * oracles.red_noise(0.3, kk, N) * 5.991464547107979 / 2 for kk in k]
    np.testing.assert_allclose(power_thresholds(f, ar, 0.95), expected, rtol=1e-9)


def test_white_noise_power_calibration():
    rng = np.random.default_rng(2024)
    fractions = []
    for _ in range(200):
        s = TimeSeries("w", 0, rng.normal(size=N))
        f = cwt(s, PARAMS)
        m = power_significance(f, AR1Params(0.0, 1.0), 0.95)
        fractions.append(significant_fraction(m.mask, f.inside_coi()))
    assert 0.03 <= np.mean(fractions) <= 0.07


def test_strong_sinusoid_is_significant():
    rng = np.random.default_rng(1)
    t = np.arange(N)
    s = TimeSeries("s", 0, 3 * np.cos(2 * np.pi * t / 16) + 0.5 * rng.normal(size=N))
    f = cwt(s, PARAMS)
    m = power_significance(f, fit_ar1(s), 0.95)
    r, c = np.unravel_index(np.argmax(np.where(f.inside_coi(), f.power, 0)), f.shape)
    assert m.mask[r, c]


def test_power_mask_monotone_in_level():
    s = TimeSeries("s", 0, simulate_ar1(AR1Params(0.6, 1.0), N, np.random.default_rng(3)))
    f = cwt(s, PARAMS)
    ar = fit_ar1(s)
    lo, hi = power_significance(f, ar, 0.95), power_significance(f, ar, 0.99)
    assert np.all(hi.mask <= lo.mask)
    assert hi.method is Method.CHI2_POWER


def test_mask_matches_statistic():
    s = TimeSeries("s", 0, np.random.default_rng(4).normal(size=N))
    f = cwt(s, PARAMS)
    m = power_significance(f, AR1Params(0.0, 1.0))
    np.testing.assert_array_equal(m.mask, f.power > m.thresholds[:, None])


@pytest.mark.parametrize("level", [0.5, 1.0, 1.2])
def test_bad_level(level):
    s = TimeSeries("s", 0, np.random.default_rng(4).normal(size=32))
    with pytest.raises(ConfigError):
        power_significance(cwt(s), AR1Params(0.0, 1.0), level)


def test_generate_surrogate():
    a = generate_surrogate(AR1Params(0.0, 1.0), 10000, rng_seed=5)
    assert 0.9 <= a.values.std(ddof=1) <= 1.1
    b = generate_surrogate(AR1Params(0.0, 1.0), 10000, rng_seed=5)
    np.testing.assert_array_equal(a.values, b.values)
    r = generate_surrogate(AR1Params(0.7, 1.0), 10000, rng_seed=6)
    assert 0.65 <= fit_ar1(r).alpha <= 0.75


def test_too_few_surrogates():
    with pytest.raises(ConfigError):
        monte_carlo_thresholds(PARAMS, AR1Params(0.1, 1.0), AR1Params(0.1, 1.0), N,
                               n_surrogates=99)


def test_thresholds_shape_and_range(thresholds):
    w = thresholds.wtc
    assert w.shape == (PARAMS.num_scales,)
    assert np.all(np.isfinite(w)) and np.all((w >= 0) & (w <= 1))
    # neighbouring scales share most of their smoothing support
    assert np.max(np.abs(np.diff(w))) < 0.1
    assert np.all(thresholds.xwt > 0)


def test_thresholds_deterministic_and_parallel_invariant(thresholds):
    ar = AR1Params(0.5, 1.0)
    again = monte_carlo_thresholds(PARAMS, ar, ar, N, n_surrogates=300, rng_seed=42, workers=2,
                                   chunk=7)
    np.testing.assert_array_equal(again.wtc, thresholds.wtc)
    np.testing.assert_array_equal(again.xwt, thresholds.xwt)


@pytest.mark.slow
def test_threshold_convergence(thresholds):
    ar = AR1Params(0.5, 1.0)
    big = wtc_significance(PARAMS, ar, ar, N, n_surrogates=1000, rng_seed=43)
    assert np.max(np.abs(big - thresholds.wtc)) < 0.05


def test_null_pair_calibration(thresholds):
    rng = np.random.default_rng(77)
    ar = AR1Params(0.5, 1.0)
    fr_wtc, fr_xwt = [], []
    for _ in range(10):
        fx = cwt(TimeSeries("x", 0, simulate_ar1(ar, N, rng)), PARAMS)
        fy = cwt(TimeSeries("y", 0, simulate_ar1(ar, N, rng)), PARAMS)
        inside = fx.inside_coi()
        fr_wtc.append(significant_fraction(wtc_mask(wtc(fx, fy), thresholds.wtc).mask, inside))
        fr_xwt.append(significant_fraction(xwt_mask(xwt(fx, fy), thresholds.xwt).mask, inside))
    assert 0.02 <= np.mean(fr_wtc) <= 0.08
    assert 0.02 <= np.mean(fr_xwt) <= 0.08


def test_wtc_mask_monotone_in_level():
    ar = AR1Params(0.3, 1.0)
    t95 = monte_carlo_thresholds(PARAMS, ar, ar, N, 100, 0.95, rng_seed=1)
    t99 = monte_carlo_thresholds(PARAMS, ar, ar, N, 100, 0.99, rng_seed=1)
    assert np.all(t99.wtc >= t95.wtc)
    rng = np.random.default_rng(8)
    fx = cwt(TimeSeries("x", 0, rng.normal(size=N)), PARAMS)
    fy = cwt(TimeSeries("y", 0, rng.normal(size=N)), PARAMS)
    c = wtc(fx, fy)
    assert np.all(wtc_mask(c, t99.wtc, 0.99).mask <= wtc_mask(c, t95.wtc, 0.95).mask)
