"""Pairwise analysis: transforms, significance masks and lead/lag regions."""

from __future__ import annotations

from dataclasses import dataclass

from .coherence import CoherenceField, CrossField, wtc, xwt
from .cwt import WaveletField, WaveletParams, cwt
from .ingest import AR1Params, TimeSeries, align, fit_ar1
from .phase_lag import (DEFAULT_BAND_SPLIT, DEFAULT_TOLERANCE, DEFAULT_WINDOWS, Region,
                        RegionSummary, band_summary, significant_regions)
from .significance import (MonteCarloThresholds, SignificanceMask, monte_carlo_thresholds,
                           power_significance, wtc_mask, xwt_mask)


@dataclass(frozen=True)
class PairResult:
    x: TimeSeries
    y: TimeSeries
    ar1_x: AR1Params
    ar1_y: AR1Params
    fx: WaveletField
    fy: WaveletField
    cross: CrossField
    coherence: CoherenceField
    thresholds: MonteCarloThresholds
    power_mask_x: SignificanceMask
    power_mask_y: SignificanceMask
    xwt_mask: SignificanceMask
    wtc_mask: SignificanceMask
    regions: list[Region]
    phase_source: str = "wtc"

    @property
    def names(self) -> tuple[str, str]:
        return self.x.name, self.y.name

    def summarize(self, windows=DEFAULT_WINDOWS, band_split: float = DEFAULT_BAND_SPLIT,
                  phase_tolerance: float = DEFAULT_TOLERANCE) -> list[RegionSummary]:
        return band_summary(self.regions, windows, band_split, phase_tolerance, self.names)


def analyze_pair(x: TimeSeries, y: TimeSeries, params: WaveletParams | None = None,
                 level: float = 0.95, n_surrogates: int = 300, rng_seed=0,
                 phase_source: str = "wtc", workers: int = 1) -> PairResult:
    """Run the full comparison of ``x`` (first) against ``y`` (second).

    Both series are trimmed to their common window. ``phase_source`` picks
    whether region phases come from the smoothed coherence spectrum
    (``"wtc"``) or the raw cross spectrum (``"xwt"``).
    """
    if phase_source not in ("wtc", "xwt"):
        raise ValueError(f"phase_source must be 'wtc' or 'xwt', got {phase_source!r}")
    x, y = align(x, y)
    params = (params or WaveletParams(dt=x.dt)).resolved(x.n)
    ar1_x, ar1_y = fit_ar1(x), fit_ar1(y)
    fx, fy = cwt(x, params), cwt(y, params)
    cross = xwt(fx, fy)
    coh = wtc(fx, fy)
    thr = monte_carlo_thresholds(params, ar1_x, ar1_y, x.n, n_surrogates, level, rng_seed,
                                 workers)
    m_wtc = wtc_mask(coh, thr.wtc, level)
    m_xwt = xwt_mask(cross, thr.xwt, level)
    phase = cross.phase if phase_source == "xwt" else None
    regions = significant_regions(m_wtc, m_xwt, fx.coi, coh, phase=phase)
    return PairResult(
        x=x, y=y, ar1_x=ar1_x, ar1_y=ar1_y, fx=fx, fy=fy, cross=cross, coherence=coh,
        thresholds=thr,
        power_mask_x=power_significance(fx, ar1_x, level),
        power_mask_y=power_significance(fy, ar1_y, level),
        xwt_mask=m_xwt, wtc_mask=m_wtc, regions=regions, phase_source=phase_source,
    )
