"""Morlet continuous wavelet transform of a single series."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import DataError
from .ingest import TimeSeries


@dataclass(frozen=True)
class WaveletParams:
    """Mother wavelet and scale grid.

    ``s0`` and ``num_scales`` may be left as ``None``; :meth:`resolved` then
    picks ``s0 = 2 dt`` and the largest grid whose top scale does not exceed
    half the record length.
    """

    omega0: float = 6.0
    dt: float = 1.0
    s0: float | None = None
    dj: float = 1.0 / 12.0
    num_scales: int | None = None
    pad: bool = True

    def __post_init__(self):
        if not self.omega0 >= 5:
            raise DataError(f"omega0 must be >= 5 for an admissible Morlet wavelet, got {self.omega0}")
        if not self.dt > 0:
            raise DataError("dt must be positive")
        if self.s0 is not None and not self.s0 > 0:
            raise DataError("s0 must be positive")
        if not self.dj > 0:
            raise DataError("dj must be positive")
        if self.num_scales is not None and self.num_scales < 1:
            raise DataError("num_scales must be at least 1")

    @property
    def is_resolved(self) -> bool:
        return self.s0 is not None and self.num_scales is not None

    def resolved(self, n: int) -> "WaveletParams":
        """Fill in defaults for a record of ``n`` samples."""
        s0 = 2.0 * self.dt if self.s0 is None else self.s0
        num_scales = self.num_scales
        if num_scales is None:
            top = n * self.dt / 2.0
            j = math.floor(math.log2(top / s0) / self.dj + 1e-9) if top > s0 else 0
            num_scales = max(j, 0) + 1
        return replace(self, s0=s0, num_scales=num_scales)


def morlet_mother(eta, omega0: float = 6.0):
    """pi^(-1/4) exp(i omega0 eta) exp(-eta^2 / 2)."""
    eta = np.asarray(eta, dtype=float)
    return np.pi ** -0.25 * np.exp(1j * omega0 * eta - 0.5 * eta ** 2)


def fourier_factor(omega0: float = 6.0) -> float:
    """Ratio of equivalent Fourier period to wavelet scale."""
    return 4.0 * np.pi / (omega0 + math.sqrt(2.0 + omega0 ** 2))


def scale_grid(params: WaveletParams, n: int | None = None) -> np.ndarray:
    if not params.is_resolved:
        if n is None:
            raise DataError("scale grid needs s0 and num_scales, or the series length")
        params = params.resolved(n)
    j = np.arange(params.num_scales)
    return params.s0 * 2.0 ** (j * params.dj)


def coi(n: int, dt: float = 1.0, omega0: float = 6.0, floor: float | None = None) -> np.ndarray:
    """Largest reliable period at each column.

    e-folding time of the Morlet edge response is sqrt(2) s, so the cone is
    ``fourier_factor * sqrt(2) * dt * distance_to_nearest_edge``. Values are
    raised to ``floor`` (default: the period of a ``2 dt`` scale) so that the
    two edge columns report the smallest period on the grid.
    """
    if floor is None:
        floor = fourier_factor(omega0) * 2.0 * dt
    idx = np.arange(n)
    dist = np.minimum(idx, n - 1 - idx)
    return np.maximum(fourier_factor(omega0) * math.sqrt(2.0) * dt * dist, floor)


def _fft_length(n: int, pad: bool) -> int:
    # 2n - 1 avoids circular wrap entirely, so the FFT route is exact
    m = 2 * n - 1
    return 1 << (m - 1).bit_length() if pad else m


@lru_cache(maxsize=32)
def _kernel_bank(n: int, m: int, scales: tuple, dt: float, omega0: float) -> np.ndarray:
    """FFTs of the sampled, energy-normalised wavelets on a length-m circle."""
    lags = np.arange(-(n - 1), n)
    bank = np.zeros((len(scales), m), dtype=complex)
    for j, s in enumerate(scales):
        # convolution kernel k[l] = conj(psi(-l dt / s)) = psi(l dt / s)
        bank[j, lags % m] = math.sqrt(dt / s) * morlet_mother(lags * dt / s, omega0)
    out = np.fft.fft(bank, axis=1)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class WaveletField:
    """Complex CWT coefficients on a (scale x time) grid."""

    coeffs: np.ndarray
    scales: np.ndarray
    periods: np.ndarray
    coi: np.ndarray
    params: WaveletParams
    series_name: str = ""
    start: int = 0
    step: int = 1
    variance: float = 1.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def months(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.n)

    @property
    def power(self) -> np.ndarray:
        return power(self)

    @property
    def phase(self) -> np.ndarray:
        return phase(self)

    def inside_coi(self) -> np.ndarray:
        """Boolean grid of cells unaffected by edge effects (period below the cone)."""
        return self.periods[:, None] < self.coi[None, :]


def transform(values, params: WaveletParams) -> np.ndarray:
    """CWT coefficients of a bare array; the mean is removed first.

    A 2-D ``values`` is a batch of series (one per row) and yields an array
    of shape ``(batch, num_scales, n)``.
    """
    x = np.asarray(values, dtype=float)
    n = x.shape[-1]
    if not params.is_resolved:
        params = params.resolved(n)
    scales = scale_grid(params)
    m = _fft_length(n, params.pad)
    bank = _kernel_bank(n, m, tuple(scales.tolist()), float(params.dt), float(params.omega0))
    spectrum = np.fft.fft(x - x.mean(axis=-1, keepdims=True), m, axis=-1)
    return np.fft.ifft(bank * spectrum[..., None, :], axis=-1)[..., :n]


def cwt(s: TimeSeries, params: WaveletParams | None = None) -> WaveletField:
    """Morlet CWT of ``s``.

    Computes ``W(s, n) = sqrt(dt/s) sum_n' (x_n' - mean) conj(psi((n' - n) dt / s))``
    with FFTs over a zero-padded buffer at least ``2N - 1`` long, which makes
    the result identical (to rounding) to the direct sum.
    """
    params = (params or WaveletParams(dt=s.dt)).resolved(s.n)
    if params.dt != s.dt:
        params = replace(params, dt=s.dt)
    scales = scale_grid(params)
    periods = fourier_factor(params.omega0) * scales
    coeffs = transform(s.values, params)
    coeffs.flags.writeable = False
    return WaveletField(
        coeffs=coeffs,
        scales=scales,
        periods=periods,
        coi=coi(s.n, params.dt, params.omega0, floor=periods[0]),
        params=params,
        series_name=s.name,
        start=s.start,
        step=s.step,
        variance=float(s.values.var(ddof=1)) if s.n > 1 else 0.0,
    )


def power(f) -> np.ndarray:
    coeffs = f.coeffs if hasattr(f, "coeffs") else np.asarray(f)
    return coeffs.real ** 2 + coeffs.imag ** 2


def wrap_phase(angle) -> np.ndarray:
    """Fold angles into (-pi, pi]."""
    angle = np.asarray(angle, dtype=float)
    return np.where(angle <= -np.pi, angle + 2 * np.pi, angle)


def phase(f) -> np.ndarray:
    coeffs = f.coeffs if hasattr(f, "coeffs") else np.asarray(f)
    return wrap_phase(np.angle(coeffs))
