"""Lead/lag extraction from wavelet phase, and crisis-window band tables.

Phase convention: ``delta_phi`` is the angle of ``W^X conj(W^Y)`` (optionally
smoothed). Positive angles (arrows in the upper half-plane) mean the first
series leads the second.
"""

from __future__ import annotations

import enum
import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .ingest import as_month, format_month

DEFAULT_TOLERANCE = 0.15
DEFAULT_BAND_SPLIT = 6.0


class Direction(str, enum.Enum):
    IN_PHASE = "in_phase"
    ANTI_PHASE = "anti_phase"
    FIRST_LEADS = "first_leads"
    FIRST_LAGS = "first_lags"

    def phrase(self, first: str, second: str) -> str:
        return {
            Direction.IN_PHASE: f"{first} in phase with {second}",
            Direction.ANTI_PHASE: f"{first} anti-phase with {second}",
            Direction.FIRST_LEADS: f"{first} leads {second}",
            Direction.FIRST_LAGS: f"{first} lags {second}",
        }[self]


class Band(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


def time_lag(delta_phi, period):
    """Delay in time units: ``|delta_phi| * period / (2 pi)``."""
    return np.abs(delta_phi) * np.asarray(period, dtype=float) / (2.0 * np.pi)


def classify_direction(delta_phi: float, phase_tolerance: float = DEFAULT_TOLERANCE) -> Direction:
    a = abs(delta_phi)
    if a < phase_tolerance:
        return Direction.IN_PHASE
    if abs(np.pi - a) < phase_tolerance:
        return Direction.ANTI_PHASE
    return Direction.FIRST_LEADS if delta_phi > 0 else Direction.FIRST_LAGS


def classify_directions(delta_phi, phase_tolerance: float = DEFAULT_TOLERANCE) -> list[Direction]:
    return [classify_direction(float(p), phase_tolerance) for p in np.ravel(delta_phi)]


@dataclass(frozen=True)
class PhaseRelation:
    delta_phi: float
    period: float
    direction: Direction
    lag_months: float

    @classmethod
    def from_phase(cls, delta_phi: float, period: float,
                   phase_tolerance: float = DEFAULT_TOLERANCE) -> "PhaseRelation":
        return cls(delta_phi, period, classify_direction(delta_phi, phase_tolerance),
                   float(time_lag(delta_phi, period)))


@dataclass(frozen=True)
class Region:
    """One 4-connected patch of jointly significant cells."""

    rows: np.ndarray
    cols: np.ndarray
    periods: np.ndarray
    phases: np.ndarray
    r2: np.ndarray
    months: np.ndarray

    @property
    def area(self) -> int:
        return int(self.rows.size)

    @property
    def lags(self) -> np.ndarray:
        return time_lag(self.phases, self.periods)

    @property
    def mean_lag(self) -> float:
        return float(self.lags.mean())

    @property
    def period_range(self) -> tuple[float, float]:
        return float(self.periods.min()), float(self.periods.max())

    @property
    def month_range(self) -> tuple[int, int]:
        return int(self.months.min()), int(self.months.max())

    def subset(self, keep: np.ndarray) -> "Region":
        return Region(self.rows[keep], self.cols[keep], self.periods[keep], self.phases[keep],
                      self.r2[keep], self.months[keep])


def _as_bool(mask) -> np.ndarray:
    return np.asarray(getattr(mask, "mask", mask), dtype=bool)


def significant_regions(wtc_mask, xwt_mask, coi, coherence, phase=None) -> list[Region]:
    """Connected patches where coherence and cross power are both significant.

    Only cells below the cone of influence count. ``phase`` overrides the
    coherence phase (e.g. to read lags from the unsmoothed cross spectrum).
    Regions are ordered by their first cell in row-major order.
    """
    periods = np.asarray(coherence.periods, dtype=float)
    coi = np.asarray(coi, dtype=float)
    cells = _as_bool(wtc_mask) & _as_bool(xwt_mask) & (periods[:, None] < coi[None, :])
    labels, count = ndimage.label(cells)
    if count == 0:
        return []
    phase = coherence.phase if phase is None else np.asarray(phase)
    months = coherence.months
    rows, cols = np.nonzero(labels)
    ids = labels[rows, cols]
    regions = []
    for k in range(1, count + 1):
        sel = ids == k
        r, c = rows[sel], cols[sel]
        regions.append(Region(r, c, periods[r], phase[r, c], coherence.r2[r, c], months[c]))
    return regions


@dataclass(frozen=True)
class Window:
    """Inclusive calendar range, e.g. a crisis period."""

    label: str
    start: int
    end: int

    def __post_init__(self):
        object.__setattr__(self, "start", as_month(self.start))
        object.__setattr__(self, "end", as_month(self.end))
        if self.end < self.start:
            raise ValueError(f"window {self.label!r} ends before it starts")

    def __str__(self) -> str:
        return f"{self.label} ({format_month(self.start)}..{format_month(self.end)})"


DEFAULT_WINDOWS = (
    Window("2001", "2000-03", "2002-12"),
    Window("2008", "2007-06", "2009-12"),
    Window("2020", "2020-01", "2021-12"),
)


@dataclass(frozen=True)
class RegionSummary:
    window: str
    band: Band
    direction: Direction
    delay_range: tuple[float, float]
    area: int
    mean_r2: float
    mean_lag: float
    names: tuple[str, str] = ("first", "second")

    @property
    def direction_phrase(self) -> str:
        return self.direction.phrase(*self.names)


def band_of(period: float, band_split: float = DEFAULT_BAND_SPLIT) -> Band:
    """Periods below the split are high frequency; the split itself is low."""
    return Band.HIGH if period < band_split else Band.LOW


def _majority(directions: list[Direction], context: str) -> Direction:
    counts = Counter(directions).most_common()
    if len(counts) > 1 and counts[0][1] == counts[1][1]:
        warnings.warn(f"{context}: tied lead/lag directions, reporting in_phase", stacklevel=3)
        return Direction.IN_PHASE
    return counts[0][0]


def band_summary(regions, windows=DEFAULT_WINDOWS, band_split: float = DEFAULT_BAND_SPLIT,
                 phase_tolerance: float = DEFAULT_TOLERANCE,
                 names: tuple[str, str] = ("first", "second")) -> list[RegionSummary]:
    """Pool region cells per window and frequency band.

    Windows x bands with no cells are left out, mirroring the empty cells of
    a lead/lag table. Rows come out window by window, high band first.
    """
    if not regions:
        return []
    periods = np.concatenate([r.periods for r in regions])
    phases = np.concatenate([r.phases for r in regions])
    r2 = np.concatenate([r.r2 for r in regions])
    months = np.concatenate([r.months for r in regions])
    high = periods < band_split
    out = []
    for w in windows:
        in_window = (months >= w.start) & (months <= w.end)
        for band, in_band in ((Band.HIGH, high), (Band.LOW, ~high)):
            sel = in_window & in_band
            if not sel.any():
                continue
            lags = time_lag(phases[sel], periods[sel])
            direction = _majority(classify_directions(phases[sel], phase_tolerance),
                                  f"window {w.label}, {band.value} band")
            out.append(RegionSummary(
                window=w.label,
                band=band,
                direction=direction,
                delay_range=(float(lags.min()), float(lags.max())),
                area=int(sel.sum()),
                mean_r2=float(r2[sel].mean()),
                mean_lag=float(lags.mean()),
                names=tuple(names),
            ))
    return out


def missing_cells(summaries, windows, bands=(Band.HIGH, Band.LOW)) -> list[tuple[str, Band]]:
    """(window, band) combinations without any significant region."""
    present = {(s.window, s.band) for s in summaries}
    return [(w.label, b) for w in windows for b in bands if (w.label, b) not in present]

