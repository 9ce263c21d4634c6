"""TOML study configuration.

Minimal example::

    [index]
    file = "gepu.csv"
    column = "GEPU"

    [[commodities]]
    file = "prices.csv"
    column = "crude_oil"

Everything else has defaults; see README for the full schema.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .cwt import WaveletParams
from .errors import ConfigError, DataError
from .ingest import TimeSeries, load_csv, log_returns, standardize
from .phase_lag import DEFAULT_BAND_SPLIT, DEFAULT_TOLERANCE, DEFAULT_WINDOWS, Window

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TRANSFORMS = ("levels", "log_returns")


@dataclass(frozen=True)
class SeriesSource:
    file: Path
    column: str
    time_column: str = "date"
    transform: str = "levels"
    standardize: bool = True
    name: str | None = None

    @property
    def label(self) -> str:
        return self.name or self.column

    def load(self) -> TimeSeries:
        s = load_csv(self.file, self.time_column, self.column)
        if self.transform == "log_returns":
            s = log_returns(s)
        if self.standardize:
            s = standardize(s)
        return s.replace(name=self.label)


@dataclass(frozen=True)
class SignificanceSettings:
    level: float = 0.95
    n_surrogates: int = 300
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class AnalysisConfig:
    index: SeriesSource
    commodities: tuple[SeriesSource, ...]
    wavelet: WaveletParams = WaveletParams()
    significance: SignificanceSettings = SignificanceSettings()
    windows: tuple[Window, ...] = DEFAULT_WINDOWS
    band_split: float = DEFAULT_BAND_SPLIT
    phase_source: str = "wtc"
    phase_tolerance: float = DEFAULT_TOLERANCE
    arrow_every: tuple[int, int] = (4, 8)
    image_format: str = "png"
    output_dir: Path = Path("out")
    jobs: int = 1
    source_path: Path | None = field(default=None, compare=False)

    def with_overrides(self, seed=None, level=None, surrogates=None, out=None,
                       jobs=None) -> "AnalysisConfig":
        sig = self.significance
        sig = replace(
            sig,
            seed=sig.seed if seed is None else int(seed),
            level=sig.level if level is None else float(level),
            n_surrogates=sig.n_surrogates if surrogates is None else int(surrogates),
        )
        _check_significance(sig)
        return replace(
            self,
            significance=sig,
            output_dir=self.output_dir if out is None else Path(out),
            jobs=self.jobs if jobs is None else int(jobs),
        )

    def commodity(self, label: str) -> SeriesSource:
        for c in self.commodities:
            if c.label == label or c.column == label:
                return c
        raise ConfigError(f"no commodity named {label!r} in configuration")


def _table(data: dict, key: str) -> dict:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{key}] must be a table")
    return value


def _reject_unknown(section: str, data: dict, allowed) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"[{section}]: unknown keys {sorted(unknown)}")


def _series(section: str, data: dict, base: Path, transform: str = "levels") -> SeriesSource:
    if not isinstance(data, dict):
        raise ConfigError(f"[{section}] must be a table")
    _reject_unknown(section, data, ("file", "column", "time_column", "transform",
                                    "standardize", "name"))
    for key in ("file", "column"):
        if key not in data:
            raise ConfigError(f"[{section}]: missing required key {key!r}")
    transform = data.get("transform", transform)
    if transform not in TRANSFORMS:
        raise ConfigError(f"[{section}].transform must be one of {TRANSFORMS}, got {transform!r}")
    path = Path(data["file"])
    if not path.is_absolute():
        path = base / path
    return SeriesSource(
        file=path,
        column=str(data["column"]),
        time_column=str(data.get("time_column", "date")),
        transform=transform,
        standardize=bool(data.get("standardize", True)),
        name=data.get("name"),
    )


def _check_significance(sig: SignificanceSettings) -> None:
    if not 0.5 < sig.level < 1:
        raise ConfigError(f"[significance].level must lie in (0.5, 1), got {sig.level}")
    if sig.n_surrogates < 100:
        raise ConfigError(f"[significance].n_surrogates must be >= 100, got {sig.n_surrogates}")
    if sig.workers < 1:
        raise ConfigError("[significance].workers must be >= 1")


def parse_config(data: dict, base: Path = Path(".")) -> AnalysisConfig:
    _reject_unknown("top level", data, ("index", "commodities", "wavelet", "significance",
                                        "windows", "phase", "render", "output", "synth"))
    if "index" not in data:
        raise ConfigError("missing [index] section")
    index = _series("index", data["index"], base)
    commodities = data.get("commodities", [])
    if not isinstance(commodities, list) or not commodities:
        raise ConfigError("need at least one [[commodities]] entry")
    sources = tuple(_series(f"commodities.{i}", c, base, "log_returns") for i, c in enumerate(commodities))
    labels = [c.label for c in sources]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate commodity labels: {labels}")
    if index.label in labels:
        raise ConfigError(f"index label {index.label!r} clashes with a commodity")

    wav = _table(data, "wavelet")
    _reject_unknown("wavelet", wav, ("omega0", "s0", "dj", "num_scales", "pad"))
    try:
        params = WaveletParams(
            omega0=float(wav.get("omega0", 6.0)),
            s0=None if wav.get("s0") is None else float(wav["s0"]),
            dj=float(wav.get("dj", 1.0 / 12.0)),
            num_scales=None if wav.get("num_scales") is None else int(wav["num_scales"]),
            pad=bool(wav.get("pad", True)),
        )
    except DataError as exc:
        raise ConfigError(f"[wavelet]: {exc}") from None

    sig_t = _table(data, "significance")
    _reject_unknown("significance", sig_t, ("level", "n_surrogates", "seed", "workers"))
    sig = SignificanceSettings(
        level=float(sig_t.get("level", 0.95)),
        n_surrogates=int(sig_t.get("n_surrogates", 300)),
        seed=int(sig_t.get("seed", 0)),
        workers=int(sig_t.get("workers", 1)),
    )
    _check_significance(sig)

    windows = DEFAULT_WINDOWS
    if "windows" in data:
        try:
            windows = tuple(Window(str(w["label"]), w["start"], w["end"]) for w in data["windows"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"[[windows]]: {exc}") from None
        if not windows:
            raise ConfigError("[[windows]] is empty")

    ph = _table(data, "phase")
    _reject_unknown("phase", ph, ("source", "tolerance", "band_split"))
    source = ph.get("source", "wtc")
    if source not in ("wtc", "xwt"):
        raise ConfigError(f"[phase].source must be 'wtc' or 'xwt', got {source!r}")

    rend = _table(data, "render")
    _reject_unknown("render", rend, ("arrow_rows", "arrow_cols", "format"))
    fmt = rend.get("format", "png")
    if fmt not in ("png", "ppm"):
        raise ConfigError(f"[render].format must be 'png' or 'ppm', got {fmt!r}")

    out = _table(data, "output")
    _reject_unknown("output", out, ("dir", "jobs"))
    out_dir = Path(out.get("dir", "out"))
    if not out_dir.is_absolute():
        out_dir = base / out_dir

    return AnalysisConfig(
        index=index,
        commodities=sources,
        wavelet=params,
        significance=sig,
        windows=windows,
        band_split=float(ph.get("band_split", DEFAULT_BAND_SPLIT)),
        phase_source=source,
        phase_tolerance=float(ph.get("tolerance", DEFAULT_TOLERANCE)),
        arrow_every=(int(rend.get("arrow_rows", 4)), int(rend.get("arrow_cols", 8))),
        image_format=fmt,
        output_dir=out_dir,
        jobs=int(out.get("jobs", 1)),
    )


def read_toml(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: configuration file not found")
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_config(path) -> AnalysisConfig:
    """Parse a study file; relative paths resolve against its directory."""
    path = Path(path)
    cfg = parse_config(read_toml(path), base=path.parent)
    return replace(cfg, source_path=path)
