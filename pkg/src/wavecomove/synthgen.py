"""Synthetic series with known lead/lag structure, for validation runs."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .ingest import AR1Params, TimeSeries, as_month, simulate_ar1


class Kind(str, enum.Enum):
    SINUSOID = "sinusoid"
    AR1 = "ar1"
    SHIFTED_COPY = "shifted_copy"
    COUPLED_PAIR = "coupled_pair"
    SUM = "sum"


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic series or pair.

    ``shift`` delays the second series relative to the first, so a positive
    shift makes the first series lead. ``coupling_window`` is a half-open
    sample range ``[start, stop)``, checked only for coupled pairs.
    """

    kind: Kind = Kind.COUPLED_PAIR
    n: int = 304
    period: float = 16.0
    amplitude: float = 1.0
    shift: int = 0
    coupling_window: tuple[int, int] = (150, 200)
    noise_alpha: float = 0.0
    noise_sigma: float = 1.0
    seed: int = 0
    start: int | str = "1997-01"
    names: tuple[str, str] = field(default=("x", "y"))

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "start", as_month(self.start))
        object.__setattr__(self, "coupling_window", tuple(int(v) for v in self.coupling_window))
        object.__setattr__(self, "names", tuple(self.names))
        if int(self.shift) != self.shift:
            raise ConfigError(f"shift must be an integer number of samples, got {self.shift}")
        object.__setattr__(self, "shift", int(self.shift))
        lo, hi = self.coupling_window
        if self.kind is Kind.COUPLED_PAIR and not 0 <= lo < hi <= self.n:
            raise ConfigError(f"coupling window {self.coupling_window} outside [0, {self.n}]")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if not self.period > 0:
            raise ConfigError("period must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> "SyntheticSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown synthetic spec keys: {sorted(unknown)}")
        return cls(**data)

    @property
    def noise(self) -> AR1Params:
        return AR1Params(alpha=self.noise_alpha, sigma=self.noise_sigma)


def sinusoid(n: int, period: float, amplitude: float = 1.0, phase: float = 0.0,
             name: str = "sinusoid", start=0) -> TimeSeries:
    """``amplitude * cos(2 pi t / period + phase)`` for t = 0..n-1."""
    t = np.arange(n)
    return TimeSeries(name, start, amplitude * np.cos(2 * np.pi * t / period + phase))


def make_shifted_pair(base: TimeSeries, shift: int) -> tuple[TimeSeries, TimeSeries]:
    """Return ``base`` and a copy delayed by ``shift`` samples (circularly)."""
    delayed = np.roll(base.values, int(shift))
    return base, base.replace(values=delayed, name=f"{base.name}_shift{int(shift)}")


def make_coupled_pair(spec: SyntheticSpec) -> tuple[TimeSeries, TimeSeries]:
    """Independent AR(1) noise plus a sinusoid shared only inside the coupling window.

    The second series carries the windowed sinusoid delayed by ``spec.shift``.
    """
    sx, sy = np.random.SeedSequence(spec.seed).spawn(2)
    noise = spec.noise
    t = np.arange(spec.n)
    lo, hi = spec.coupling_window
    common = np.where((t >= lo) & (t < hi),
                      spec.amplitude * np.cos(2 * np.pi * t / spec.period), 0.0)
    x = common + simulate_ar1(noise, spec.n, np.random.default_rng(sx))
    y = np.roll(common, spec.shift) + simulate_ar1(noise, spec.n, np.random.default_rng(sy))
    first, second = spec.names
    return TimeSeries(first, spec.start, x), TimeSeries(second, spec.start, y)


def generate(spec: SyntheticSpec) -> tuple[TimeSeries, ...]:
    """Build the series a spec describes (one for sinusoid/ar1/sum, two otherwise)."""
    first = spec.names[0]
    rng = np.random.default_rng(spec.seed)
    if spec.kind is Kind.SINUSOID:
        return (sinusoid(spec.n, spec.period, spec.amplitude, name=first, start=spec.start),)
    if spec.kind is Kind.AR1:
        return (TimeSeries(first, spec.start, simulate_ar1(spec.noise, spec.n, rng)),)
    if spec.kind is Kind.SUM:
        wave = sinusoid(spec.n, spec.period, spec.amplitude, name=first, start=spec.start)
        return (wave.replace(values=wave.values + simulate_ar1(spec.noise, spec.n, rng)),)
    if spec.kind is Kind.SHIFTED_COPY:
        base = sinusoid(spec.n, spec.period, spec.amplitude, name=first, start=spec.start)
        a, b = make_shifted_pair(base, spec.shift)
        return a, b.replace(name=spec.names[1])
    return make_coupled_pair(spec)
