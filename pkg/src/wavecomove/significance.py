"""Red-noise significance for wavelet power, cross power and coherence.

Single-series power is tested against the theoretical AR(1) spectrum with a
chi-square(2) distribution. Coherence and cross power are tested against
per-scale thresholds estimated from pairs of independent AR(1) surrogates.
Each surrogate owns a child of one :class:`numpy.random.SeedSequence`, so the
thresholds do not depend on how the work is chunked or parallelised.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .coherence import CoherenceField, CrossField, coherence_ratio, smoothed_spectra
from .cwt import WaveletField, WaveletParams, coi, fourier_factor, scale_grid, transform
from .errors import ConfigError
from .ingest import AR1Params, TimeSeries, simulate_ar1

MIN_SURROGATES = 100


class Method(str, enum.Enum):
    CHI2_POWER = "chi2_power"
    MC_WTC = "mc_wtc"
    MC_XWT = "mc_xwt"


@dataclass(frozen=True)
class SignificanceMask:
    """Cells whose statistic exceeds the per-scale threshold at ``level``."""

    mask: np.ndarray
    level: float
    method: Method
    thresholds: np.ndarray
    statistic: np.ndarray | None = None

    @classmethod
    def from_statistic(cls, statistic, thresholds, level, method) -> "SignificanceMask":
        statistic = np.asarray(statistic, dtype=float)
        thresholds = np.asarray(thresholds, dtype=float)
        return cls(
            mask=statistic > thresholds[:, None],
            level=float(level),
            method=Method(method),
            thresholds=thresholds,
            statistic=statistic,
        )


def _check_level(level: float) -> None:
    if not 0.5 < level < 1:
        raise ConfigError(f"confidence level must lie in (0.5, 1), got {level}")


def red_noise_spectrum(alpha: float, k, n: int):
    """Normalised AR(1) spectrum at (possibly fractional) frequency index ``k``."""
    k = np.asarray(k, dtype=float)
    return (1.0 - alpha ** 2) / (1.0 + alpha ** 2 - 2.0 * alpha * np.cos(2.0 * np.pi * k / n))


def power_thresholds(f: WaveletField, ar1: AR1Params, level: float = 0.95) -> np.ndarray:
    n = f.n
    k = n * f.params.dt / f.periods
    background = red_noise_spectrum(ar1.alpha, k, n)
    return f.variance * background * stats.chi2.ppf(level, 2) / 2.0


def power_significance(f: WaveletField, ar1: AR1Params, level: float = 0.95) -> SignificanceMask:
    """Mark wavelet power above the AR(1) background at the given confidence."""
    _check_level(level)
    return SignificanceMask.from_statistic(
        f.power, power_thresholds(f, ar1, level), level, Method.CHI2_POWER
    )


def generate_surrogate(ar1: AR1Params, n: int, rng_seed=None, name: str = "surrogate",
                       start: int = 0) -> TimeSeries:
    """Stationary AR(1) realisation of length ``n``; fixed seeds repeat exactly."""
    rng = np.random.default_rng(rng_seed)
    return TimeSeries(name, start, simulate_ar1(ar1, n, rng))


@dataclass(frozen=True)
class MonteCarloThresholds:
    """Per-scale surrogate quantiles for coherence and normalised cross power."""

    wtc: np.ndarray
    xwt: np.ndarray
    level: float
    n_surrogates: int


def _pool_selection(periods: np.ndarray, cone: np.ndarray) -> np.ndarray:
    """Cells pooled for each row's quantile: those below the cone.

    A row lying entirely inside the cone falls back to all of its cells so
    that every scale still gets a finite threshold.
    """
    sel = periods[:, None] < cone[None, :]
    empty = ~sel.any(axis=1)
    sel[empty] = True
    return sel


def _surrogate_chunk(seeds, ar1_x, ar1_y, params, n, sel):
    batch_x = np.empty((len(seeds), n))
    batch_y = np.empty((len(seeds), n))
    for i, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        batch_x[i] = simulate_ar1(ar1_x, n, rng)
        batch_y[i] = simulate_ar1(ar1_y, n, rng)
    scales = scale_grid(params)
    wx = transform(batch_x, params)
    wy = transform(batch_y, params)
    sxy, sxx, syy = smoothed_spectra(wx, wy, scales, params.dt, params.dj)
    r2 = coherence_ratio(sxy, sxx, syy)
    sd = batch_x.std(axis=1, ddof=1) * batch_y.std(axis=1, ddof=1)
    cross = np.abs(wx * np.conj(wy)) / sd[:, None, None]
    return r2[:, sel], cross[:, sel]


def monte_carlo_thresholds(params: WaveletParams, ar1_x: AR1Params, ar1_y: AR1Params, n: int,
                           n_surrogates: int = 300, level: float = 0.95, rng_seed=0,
                           workers: int = 1, chunk: int = 16) -> MonteCarloThresholds:
    """Surrogate ``level``-quantiles of coherence and normalised cross power per scale.

    Values are pooled over all surrogate time points below the cone of
    influence. Results are identical for any ``workers`` and ``chunk``.
    """
    _check_level(level)
    if n_surrogates < MIN_SURROGATES:
        raise ConfigError(f"need at least {MIN_SURROGATES} surrogates, got {n_surrogates}")
    params = params.resolved(n)
    periods = fourier_factor(params.omega0) * scale_grid(params)
    sel = _pool_selection(periods, coi(n, params.dt, params.omega0, floor=periods[0]))
    children = np.random.SeedSequence(rng_seed).spawn(n_surrogates)
    groups = [children[i:i + chunk] for i in range(0, n_surrogates, chunk)]

    def run(group):
        return _surrogate_chunk(group, ar1_x, ar1_y, params, n, sel)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, groups))
    else:
        parts = [run(g) for g in groups]
    r2 = np.concatenate([p[0] for p in parts])
    cross = np.concatenate([p[1] for p in parts])

    row_of = np.nonzero(sel)[0]
    bounds = np.searchsorted(row_of, np.arange(sel.shape[0] + 1))
    wtc_thr = np.empty(sel.shape[0])
    xwt_thr = np.empty(sel.shape[0])
    for j in range(sel.shape[0]):
        cols = slice(bounds[j], bounds[j + 1])
        wtc_thr[j] = np.quantile(r2[:, cols], level)
        xwt_thr[j] = np.quantile(cross[:, cols], level)
    return MonteCarloThresholds(wtc=wtc_thr, xwt=xwt_thr, level=level, n_surrogates=n_surrogates)


def wtc_significance(params: WaveletParams, ar1_x: AR1Params, ar1_y: AR1Params, n: int,
                     n_surrogates: int = 300, level: float = 0.95, rng_seed=0,
                     workers: int = 1) -> np.ndarray:
    """Per-scale coherence thresholds from ``n_surrogates`` independent AR(1) pairs."""
    return monte_carlo_thresholds(params, ar1_x, ar1_y, n, n_surrogates, level, rng_seed,
                                  workers).wtc


def xwt_significance(params: WaveletParams, ar1_x: AR1Params, ar1_y: AR1Params, n: int,
                     n_surrogates: int = 300, level: float = 0.95, rng_seed=0,
                     workers: int = 1) -> np.ndarray:
    """Per-scale thresholds for ``|W^XY| / (sd_x sd_y)``."""
    return monte_carlo_thresholds(params, ar1_x, ar1_y, n, n_surrogates, level, rng_seed,
                                  workers).xwt


def wtc_mask(c: CoherenceField, thresholds, level: float = 0.95) -> SignificanceMask:
    return SignificanceMask.from_statistic(c.r2, thresholds, level, Method.MC_WTC)


def xwt_mask(x: CrossField, thresholds, level: float = 0.95) -> SignificanceMask:
    return SignificanceMask.from_statistic(x.normalized_power, thresholds, level, Method.MC_XWT)


def significant_fraction(mask, reliable) -> float:
    """Share of reliable (below-cone) cells that are flagged."""
    mask = getattr(mask, "mask", mask)
    reliable = np.asarray(reliable, dtype=bool)
    return float(mask[reliable].mean()) if reliable.any() else 0.0
