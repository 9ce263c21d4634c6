"""CSV formats for grids, masks, cones of influence, series and lead/lag tables.

Grid files: a header row ``period,<time label>,...`` and one row per scale
holding the period followed by the values. Masks use the same layout with
0/1 entries. Floats are written with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DataError
from .ingest import TimeSeries, format_month, parse_month

SUMMARY_COLUMNS = ("commodity", "window", "band", "direction", "delay_min_months",
                   "delay_max_months", "area_cells", "mean_r2")


def _fmt(v) -> str:
    return repr(float(v))


def _open_write(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="utf-8")


def write_grid(path, grid, periods, labels) -> Path:
    grid = np.asarray(grid)
    is_mask = grid.dtype == bool
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", *labels])
        for period, row in zip(periods, grid):
            cells = [str(int(v)) for v in row] if is_mask else [_fmt(v) for v in row]
            w.writerow([_fmt(period), *cells])
    return Path(path)


def read_grid(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Return ``(grid, periods, labels)`` from a grid or mask file."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or not rows[0] or rows[0][0] != "period":
        raise DataError(f"{path}: not a grid file (expected a 'period' header)")
    labels = rows[0][1:]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if data.shape[1] != len(labels) + 1:
        raise DataError(f"{path}: ragged grid")
    return data[:, 1:], data[:, 0], labels


def write_coi(path, labels, cone) -> Path:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "coi_period"])
        for label, v in zip(labels, cone):
            w.writerow([label, _fmt(v)])
    return Path(path)


def read_coi(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    try:
        return [r["time"] for r in rows], np.array([float(r["coi_period"]) for r in rows])
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: malformed cone-of-influence file ({exc})") from None


def write_thresholds(path, periods, columns: dict) -> Path:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", *columns])
        for i, period in enumerate(periods):
            w.writerow([_fmt(period), *(_fmt(v[i]) for v in columns.values())])
    return Path(path)


def write_series(path, series: list[TimeSeries], time_column: str = "date") -> Path:
    """Write equally long, co-registered series as one monthly CSV."""
    first = series[0]
    for s in series[1:]:
        if s.start != first.start or s.n != first.n or s.step != first.step:
            raise DataError(f"series {s.name} is not aligned with {first.name}")
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([time_column, *(s.name for s in series)])
        for i, label in enumerate(first.labels):
            w.writerow([label, *(_fmt(s.values[i]) for s in series)])
    return Path(path)


def summary_rows(commodity: str, summaries) -> list[dict]:
    return [
        {
            "commodity": commodity,
            "window": s.window,
            "band": s.band.value,
            "direction": s.direction_phrase,
            "delay_min_months": f"{s.delay_range[0]:.6f}",
            "delay_max_months": f"{s.delay_range[1]:.6f}",
            "area_cells": str(s.area),
            "mean_r2": f"{s.mean_r2:.6f}",
        }
        for s in summaries
    ]


def write_summary(path, rows: list[dict]) -> Path:
    with _open_write(path) as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return Path(path)


def read_summary(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_coverage(path, missing: list[tuple[str, str, str]]) -> Path:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["commodity", "window", "band"])
        w.writerows(missing)
    return Path(path)


def labels_to_months(labels) -> np.ndarray:
    return np.array([parse_month(label) for label in labels])


def months_to_labels(months) -> list[str]:
    return [format_month(m) for m in months]
