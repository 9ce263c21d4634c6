"""Command-line front end: ``analyze``, ``batch``, ``synth`` and ``render``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gridio
from .config import AnalysisConfig, SeriesSource, load_config, read_toml
from .errors import ConfigError, DataError, WavecomoveError
from .ingest import align
from .phase_lag import Band, missing_cells
from .pipeline import PairResult, analyze_pair
from .render import heatmap_image, save_image, stack_images
from .synthgen import Kind, SyntheticSpec, generate

log = logging.getLogger("wavecomove")


@dataclass(frozen=True)
class PairOutput:
    label: str
    directory: Path
    rows: list[dict]
    missing: list[tuple[str, str, str]]


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_") or "pair"


def pair_seed(base_seed: int, label: str) -> list[int]:
    """Per-pair seed entropy; depends on the label only, not on batch order."""
    return [int(base_seed), zlib.crc32(label.encode("utf-8"))]


def _load(source: SeriesSource):
    try:
        return source.load()
    except DataError as exc:
        raise DataError(f"[{source.label}] {source.file} column {source.column!r}: {exc}") from None


def _check_windows(cfg: AnalysisConfig, x, label: str) -> None:
    for w in cfg.windows:
        if w.end < x.start or w.start > x.end:
            raise ConfigError(
                f"window {w} lies outside the aligned data range of {label} "
                f"({x.labels[0]}..{x.labels[-1]})"
            )


def write_pair_artifacts(result: PairResult, cfg: AnalysisConfig, directory: Path,
                         label: str) -> PairOutput:
    directory.mkdir(parents=True, exist_ok=True)
    fx, fy, cross, coh = result.fx, result.fy, result.cross, result.coherence
    labels = result.x.labels
    periods = fx.periods
    grids = {
        "power_x": fx.power,
        "power_y": fy.power,
        "xwt_power": cross.power,
        "xwt_phase": cross.phase,
        "wtc_r2": coh.r2,
        "wtc_phase": coh.phase,
    }
    for name, grid in grids.items():
        gridio.write_grid(directory / "grids" / f"{name}.csv", grid, periods, labels)
    masks = {
        "power_x_mask": result.power_mask_x,
        "power_y_mask": result.power_mask_y,
        "xwt_mask": result.xwt_mask,
        "wtc_mask": result.wtc_mask,
    }
    for name, m in masks.items():
        gridio.write_grid(directory / "masks" / f"{name}.csv", m.mask, periods, labels)
    gridio.write_coi(directory / "coi.csv", labels, fx.coi)
    gridio.write_thresholds(directory / "thresholds.csv", periods, {
        "power_x": result.power_mask_x.thresholds,
        "power_y": result.power_mask_y.thresholds,
        "xwt": result.xwt_mask.thresholds,
        "wtc": result.wtc_mask.thresholds,
    })
    gridio.write_series(directory / "series.csv", [result.x, result.y])

    ext = cfg.image_format
    common = dict(periods=periods, labels=labels, every=cfg.arrow_every)
    power_img = stack_images([
        heatmap_image(np.log2(fx.power + 1e-12), fx.coi, result.power_mask_x.mask,
                      title=f"{result.x.name}: log2 wavelet power", **common),
        heatmap_image(np.log2(fy.power + 1e-12), fy.coi, result.power_mask_y.mask,
                      title=f"{result.y.name}: log2 wavelet power", **common),
    ])
    save_image(power_img, directory / f"power.{ext}")
    save_image(heatmap_image(np.log2(cross.power + 1e-12), fx.coi, result.xwt_mask.mask,
                             cross.phase, title=f"XWT {result.x.name} vs {result.y.name}",
                             **common), directory / f"xwt.{ext}")
    save_image(heatmap_image(coh.r2, fx.coi, result.wtc_mask.mask, coh.phase, vmin=0.0, vmax=1.0,
                             title=f"WTC {result.x.name} vs {result.y.name}", **common),
               directory / f"wtc.{ext}")

    summaries = result.summarize(cfg.windows, cfg.band_split, cfg.phase_tolerance)
    rows = gridio.summary_rows(label, summaries)
    gridio.write_summary(directory / "regions.csv", rows)
    missing = [(label, w, b.value) for w, b in missing_cells(summaries, cfg.windows,
                                                             (Band.HIGH, Band.LOW))]
    return PairOutput(label, directory, rows, missing)


def run_pair(cfg: AnalysisConfig, commodity: SeriesSource, index=None) -> PairOutput:
    """Analyse the index against one commodity and write its artifacts."""
    x = _load(cfg.index) if index is None else index
    y = _load(commodity)
    x, y = align(x, y)
    _check_windows(cfg, x, commodity.label)
    sig = cfg.significance
    log.info("analysing %s vs %s (%d months)", x.name, y.name, x.n)
    result = analyze_pair(
        x, y, cfg.wavelet, level=sig.level, n_surrogates=sig.n_surrogates,
        rng_seed=pair_seed(sig.seed, commodity.label), phase_source=cfg.phase_source,
        workers=sig.workers,
    )
    directory = cfg.output_dir / _slug(commodity.label)
    return write_pair_artifacts(result, cfg, directory, commodity.label)


def run_batch(cfg: AnalysisConfig) -> list[PairOutput]:
    """Every commodity against the index, plus combined summary and coverage files."""
    index = _load(cfg.index)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            outputs = list(pool.map(lambda c: run_pair(cfg, c, index), cfg.commodities))
    else:
        outputs = [run_pair(cfg, c, index) for c in cfg.commodities]
    rows = [r for o in outputs for r in o.rows]
    gridio.write_summary(cfg.output_dir / "summary.csv", rows)
    gridio.write_coverage(cfg.output_dir / "coverage.csv", [m for o in outputs for m in o.missing])
    return outputs


def _synth_spec(args) -> SyntheticSpec:
    data = {}
    if args.config:
        data = dict(read_toml(args.config).get("synth", {}))
    for key in ("kind", "n", "period", "amplitude", "shift", "noise_alpha", "noise_sigma",
                "seed", "start"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if args.window is not None:
        data["coupling_window"] = tuple(args.window)
    if args.names is not None:
        data["names"] = tuple(args.names)
    try:
        return SyntheticSpec.from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"synthetic spec: {exc}") from None


def cmd_synth(args) -> int:
    series = generate(_synth_spec(args))
    path = gridio.write_series(args.out, list(series))
    log.info("wrote %s", path)
    return 0


def cmd_render(args) -> int:
    grid, periods, labels = gridio.read_grid(args.grid)
    coi_labels, cone = gridio.read_coi(args.coi)
    if coi_labels != labels:
        raise DataError(f"{args.coi}: time axis does not match {args.grid}")
    mask = phase = None
    if args.mask:
        m, mp, ml = gridio.read_grid(args.mask)
        if m.shape != grid.shape:
            raise DataError(f"{args.mask}: shape {m.shape} differs from grid {grid.shape}")
        mask = m.astype(bool)
    if args.phase:
        phase, _, _ = gridio.read_grid(args.phase)
        if phase.shape != grid.shape:
            raise DataError(f"{args.phase}: shape differs from grid")
    values = np.log2(grid + 1e-12) if args.log2 else grid
    img = heatmap_image(values, cone, mask, phase, periods=periods, labels=labels,
                        vmin=args.vmin, vmax=args.vmax, title=args.title or "",
                        every=(args.arrow_rows, args.arrow_cols))
    save_image(img, args.out)
    return 0


def _config_from_args(args) -> AnalysisConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=args.seed, level=args.level, surrogates=args.surrogates,
                              out=args.out, jobs=getattr(args, "jobs", None))


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    commodity = cfg.commodity(args.commodity) if args.commodity else cfg.commodities[0]
    out = run_pair(cfg, commodity)
    print(out.directory / "regions.csv")
    return 0


def cmd_batch(args) -> int:
    cfg = _config_from_args(args)
    run_batch(cfg)
    print(cfg.output_dir / "summary.csv")
    return 0


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="study configuration (TOML)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--level", type=float, help="confidence level, e.g. 0.95")
    p.add_argument("--surrogates", type=int, help="number of surrogate pairs")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavecomove", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyse the index against one commodity")
    _add_overrides(p)
    p.add_argument("--commodity", help="commodity label (default: the first one)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("batch", help="analyse every commodity and write combined tables")
    _add_overrides(p)
    p.add_argument("--jobs", type=int, help="pairs to run concurrently")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("synth", help="generate synthetic series as CSV")
    p.add_argument("--config", help="TOML file with a [synth] table")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--kind", choices=[k.value for k in Kind])
    p.add_argument("--n", type=int)
    p.add_argument("--period", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--shift", type=int)
    p.add_argument("--noise-alpha", dest="noise_alpha", type=float)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--start", help="first month, YYYY-MM")
    p.add_argument("--window", type=int, nargs=2, metavar=("START", "STOP"))
    p.add_argument("--names", nargs=2, metavar=("FIRST", "SECOND"))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("render", help="re-render a heatmap from exported grid files")
    p.add_argument("grid")
    p.add_argument("--coi", required=True, help="cone-of-influence CSV")
    p.add_argument("--mask", help="0/1 significance grid")
    p.add_argument("--phase", help="phase grid (radians) for arrows")
    p.add_argument("--out", required=True, help="image path (.png or .ppm)")
    p.add_argument("--log2", action="store_true", help="plot log2 of the values")
    p.add_argument("--vmin", type=float)
    p.add_argument("--vmax", type=float)
    p.add_argument("--title")
    p.add_argument("--arrow-rows", type=int, default=4)
    p.add_argument("--arrow-cols", type=int, default=8)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except WavecomoveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
