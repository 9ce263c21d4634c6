"""Wavelet co-movement analysis of monthly series: CWT, cross spectra, coherence and lead/lag."""

from .coherence import CoherenceField, CrossField, smooth, wtc, xwt
from .cwt import WaveletField, WaveletParams, coi, cwt, fourier_factor, scale_grid
from .errors import ConfigError, DataError, GridMismatchError, NumericError, WavecomoveError
from .ingest import AR1Params, TimeSeries, align, fit_ar1, load_csv, log_returns, standardize
from .phase_lag import Direction, Region, RegionSummary, Window, band_summary, significant_regions
from .pipeline import PairResult, analyze_pair
from .significance import (MonteCarloThresholds, SignificanceMask, monte_carlo_thresholds,
                           power_significance, wtc_significance, xwt_significance)
from .synthgen import SyntheticSpec, generate

__version__ = "0.1.0"

__all__ = [
    "CoherenceField",
    "CrossField",
    "smooth",
    "wtc",
    "xwt",
    "WaveletField",
    "WaveletParams",
    "coi",
    "cwt",
    "fourier_factor",
    "scale_grid",
    "ConfigError",
    "DataError",
    "GridMismatchError",
    "NumericError",
    "WavecomoveError",
    "AR1Params",
    "TimeSeries",
    "align",
    "fit_ar1",
    "load_csv",
    "log_returns",
    "standardize",
    "Direction",
    "Region",
    "RegionSummary",
    "Window",
    "band_summary",
    "significant_regions",
    "PairResult",
    "analyze_pair",
    "MonteCarloThresholds",
    "SignificanceMask",
    "monte_carlo_thresholds",
    "power_significance",
    "wtc_significance",
    "xwt_significance",
    "SyntheticSpec",
    "generate",
]
