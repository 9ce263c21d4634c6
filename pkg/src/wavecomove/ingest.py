"""Loading, transforming and aligning monthly series.

Calendar months are carried as integer ordinals (``year * 12 + month - 1``)
so that alignment and window arithmetic stay exact.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .errors import DataError

_MONTH_RE = re.compile(r"^\s*(\d{4})-(\d{1,2})(?:-\d{1,2})?\s*$")


def parse_month(text: str) -> int:
    """Parse ``YYYY-MM`` (a trailing ``-DD`` is tolerated and ignored)."""
    m = _MONTH_RE.match(text)
    if m is None:
        raise DataError(f"not a YYYY-MM month: {text!r}")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise DataError(f"month out of range in {text!r}")
    return year * 12 + month - 1


def format_month(ordinal: int) -> str:
    year, month0 = divmod(int(ordinal), 12)
    return f"{year:04d}-{month0 + 1:02d}"


def as_month(value) -> int:
    if isinstance(value, str):
        return parse_month(value)
    if isinstance(value, tuple):
        year, month = value
        return int(year) * 12 + int(month) - 1
    return int(value)


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real series; sample ``i`` sits at month ``start + i * step``."""

    name: str
    start: int
    values: np.ndarray
    step: int = 1

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        # a single value is allowed so that a 2-price file still has a return
        if values.ndim != 1 or values.size < 1:
            raise DataError(f"{self.name}: need a non-empty 1-D series")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(f"{self.name}: non-finite value at index {bad}")
        if self.step <= 0:
            raise DataError(f"{self.name}: step must be positive")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", as_month(self.start))

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def dt(self) -> float:
        return float(self.step)

    @property
    def end(self) -> int:
        """Month ordinal of the last sample."""
        return self.start + (self.n - 1) * self.step

    @property
    def months(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.n)

    @property
    def labels(self) -> list[str]:
        return [format_month(m) for m in self.months]

    def replace(self, **changes) -> "TimeSeries":
        kwargs = dict(name=self.name, start=self.start, values=self.values, step=self.step)
        kwargs.update(changes)
        return TimeSeries(**kwargs)


@dataclass(frozen=True)
class AR1Params:
    """Red-noise model ``x_t - mean = alpha (x_{t-1} - mean) + sigma e_t``."""

    alpha: float
    sigma: float
    mean: float = 0.0

    def __post_init__(self):
        if not abs(self.alpha) < 1:
            raise DataError(f"AR(1) alpha must satisfy |alpha| < 1, got {self.alpha}")
        if not self.sigma > 0:
            raise DataError(f"AR(1) sigma must be positive, got {self.sigma}")

    @property
    def variance(self) -> float:
        """Stationary process variance."""
        return self.sigma ** 2 / (1.0 - self.alpha ** 2)


def simulate_ar1(ar1: AR1Params, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a stationary AR(1) path; the first value comes from the stationary law."""
    e = rng.standard_normal(n)
    e[0] *= math.sqrt(ar1.variance)
    e[1:] *= ar1.sigma
    return lfilter([1.0], [1.0, -ar1.alpha], e) + ar1.mean


def load_csv(path, time_column: str, value_column: str) -> TimeSeries:
    """Read one value column of a monthly CSV file.

    Rows must be strictly increasing, gap-free months. Empty or non-numeric
    cells are rejected with their line number; nothing is interpolated.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (time_column, value_column):
            if col not in header:
                raise DataError(f"{path}: column {col!r} not found (have {header})")
        months, values = [], []
        for row in reader:
            line = reader.line_num
            try:
                month = parse_month(row[time_column] or "")
            except DataError as exc:
                raise DataError(f"{path}:{line}: {exc}") from None
            raw = (row[value_column] or "").strip()
            try:
                value = float(raw)
            except ValueError:
                raise DataError(
                    f"{path}:{line}: non-numeric value {raw!r} in column {value_column!r}"
                ) from None
            if not math.isfinite(value):
                raise DataError(f"{path}:{line}: non-finite value in column {value_column!r}")
            if months:
                prev = months[-1]
                if month <= prev:
                    raise DataError(
                        f"{path}:{line}: timestamps not increasing "
                        f"({format_month(month)} after {format_month(prev)})"
                    )
                if month != prev + 1:
                    raise DataError(
                        f"{path}:{line}: gap after {format_month(prev)}, "
                        f"missing month {format_month(prev + 1)}"
                    )
            months.append(month)
            values.append(value)
    if len(values) < 2:
        raise DataError(f"{path}: need at least 2 rows, found {len(values)}")
    return TimeSeries(value_column, months[0], np.asarray(values))


def log_returns(s: TimeSeries) -> TimeSeries:
    v = s.values
    if np.any(v <= 0):
        bad = int(np.flatnonzero(v <= 0)[0])
        raise DataError(f"{s.name}: non-positive value {v[bad]} at index {bad}")
    return s.replace(values=np.diff(np.log(v)), start=s.start + s.step)


def standardize(s: TimeSeries) -> TimeSeries:
    """Remove the mean and divide by the sample (n-1) standard deviation."""
    v = s.values
    if v.size < 2:
        raise DataError(f"{s.name}: need at least 2 values to standardize")
    centered = v - v.mean()
    sd = centered.std(ddof=1)
    if not sd > 1e-13 * float(np.abs(v).max()):
        raise DataError(f"{s.name}: zero variance, cannot standardize")
    out = centered / sd
    # second pass trims the rounding residue of the mean
    out -= out.mean()
    return s.replace(values=out)


def align(a: TimeSeries, b: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    """Trim both series to their common calendar window."""
    if a.step != b.step:
        raise DataError(f"cannot align {a.name} (step {a.step}) with {b.name} (step {b.step})")
    if (a.start - b.start) % a.step:
        raise DataError(f"{a.name} and {b.name} are sampled on offset grids")
    lo, hi = max(a.start, b.start), min(a.end, b.end)
    if hi - lo < a.step:
        raise DataError(
            f"no usable overlap between {a.name} ({format_month(a.start)}..{format_month(a.end)}) "
            f"and {b.name} ({format_month(b.start)}..{format_month(b.end)})"
        )

    def trim(s: TimeSeries) -> TimeSeries:
        i0 = (lo - s.start) // s.step
        i1 = (hi - s.start) // s.step + 1
        return s.replace(values=s.values[i0:i1], start=lo)

    return trim(a), trim(b)


def lag1_autocorrelation(values) -> float:
    x = np.asarray(values, dtype=float)
    x = x - x.mean()
    denom = np.dot(x, x)
    if denom <= 0:
        raise DataError("zero variance, lag-1 autocorrelation undefined")
    return float(np.dot(x[:-1], x[1:]) / denom)


def fit_ar1(s: TimeSeries, clamp: bool = True) -> AR1Params:
    """Fit the red-noise background used for surrogates and chi-square tests.

    ``alpha`` is the lag-1 sample autocorrelation; with ``clamp`` it is
    limited to ``[0, 0.999]`` so anti-persistent estimates fall back to white
    noise. ``sigma`` makes the stationary variance equal the sample variance.
    """
    v = s.values
    if v.size < 8:
        raise DataError(f"{s.name}: need at least 8 samples to fit AR(1), have {v.size}")
    var = v.var(ddof=1)
    if not var > 0:
        raise DataError(f"{s.name}: zero variance, cannot fit AR(1)")
    alpha = lag1_autocorrelation(v)
    if clamp:
        alpha = min(max(alpha, 0.0), 0.999)
    else:
        alpha = min(max(alpha, -0.999), 0.999)
    sigma = math.sqrt(var * (1.0 - alpha ** 2))
    return AR1Params(alpha=alpha, sigma=sigma, mean=float(v.mean()))
