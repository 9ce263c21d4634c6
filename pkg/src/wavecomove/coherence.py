"""Cross wavelet transform, time/scale smoothing and squared wavelet coherence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cwt import WaveletField, wrap_phase
from .errors import GridMismatchError


@dataclass(frozen=True)
class CrossField:
    """``W^XY = W^X conj(W^Y)`` on the grid shared by both inputs."""

    coeffs: np.ndarray
    scales: np.ndarray
    periods: np.ndarray
    coi: np.ndarray
    names: tuple[str, str]
    start: int = 0
    step: int = 1
    sd_x: float = 1.0
    sd_y: float = 1.0

    @property
    def power(self) -> np.ndarray:
        """Cross wavelet power ``|W^XY|``."""
        return np.abs(self.coeffs)

    @property
    def phase(self) -> np.ndarray:
        return wrap_phase(np.angle(self.coeffs))

    @property
    def normalized_power(self) -> np.ndarray:
        """``|W^XY| / (sd_x sd_y)``, the statistic tested by Monte Carlo."""
        return self.power / (self.sd_x * self.sd_y)

    @property
    def months(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.coeffs.shape[1])

    def inside_coi(self) -> np.ndarray:
        return self.periods[:, None] < self.coi[None, :]


@dataclass(frozen=True)
class CoherenceField:
    """Squared coherence ``r2`` in [0, 1] and the phase of the smoothed cross spectrum."""

    r2: np.ndarray
    phase: np.ndarray
    scales: np.ndarray
    periods: np.ndarray
    coi: np.ndarray
    names: tuple[str, str] = ("x", "y")
    start: int = 0
    step: int = 1

    @property
    def months(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.r2.shape[1])

    def inside_coi(self) -> np.ndarray:
        return self.periods[:, None] < self.coi[None, :]


def _check_compatible(fx: WaveletField, fy: WaveletField) -> None:
    if fx.coeffs.shape != fy.coeffs.shape:
        raise GridMismatchError(f"grid shapes differ: {fx.coeffs.shape} vs {fy.coeffs.shape}")
    if fx.params.dt != fy.params.dt or fx.step != fy.step:
        raise GridMismatchError("sampling intervals differ")
    if not np.allclose(fx.scales, fy.scales, rtol=1e-12, atol=0):
        raise GridMismatchError("scale grids differ")
    if fx.start != fy.start:
        raise GridMismatchError("series are not aligned in time")


def xwt(fx: WaveletField, fy: WaveletField) -> CrossField:
    _check_compatible(fx, fy)
    return CrossField(
        coeffs=fx.coeffs * np.conj(fy.coeffs),
        scales=fx.scales,
        periods=fx.periods,
        coi=fx.coi,
        names=(fx.series_name, fy.series_name),
        start=fx.start,
        step=fx.step,
        sd_x=math.sqrt(fx.variance),
        sd_y=math.sqrt(fy.variance),
    )


def boxcar_width(dj: float) -> int:
    """Scale-direction window: 0.6 / dj rows, rounded to the nearest odd count."""
    return max(1, 2 * int(round((0.6 / dj - 1.0) / 2.0)) + 1)


def _periodized(kernel: np.ndarray, period: int) -> np.ndarray:
    # kernel is centred: index r corresponds to offset 0
    r = (kernel.size - 1) // 2
    out = np.zeros(period)
    np.add.at(out, np.arange(-r, r + 1) % period, kernel)
    return out


@lru_cache(maxsize=32)
def _time_kernels(n: int, scales: tuple, dt: float) -> np.ndarray:
    """Spectra of the unit-sum Gaussians, periodised over the 2n reflected record.

    The periodised kernels are even, so their spectra are real; only the
    non-negative half is kept, for use with ``rfft``.
    """
    bank = np.empty((len(scales), 2 * n))
    for j, s in enumerate(scales):
        sigma = s / dt
        r = max(1, int(math.ceil(4.0 * sigma)))
        t = np.arange(-r, r + 1)
        g = np.exp(-0.5 * (t / sigma) ** 2)
        bank[j] = _periodized(g / g.sum(), 2 * n)
    out = np.fft.rfft(bank, axis=1).real
    out.flags.writeable = False
    return out


def _smooth_time(grid: np.ndarray, kernels: np.ndarray) -> np.ndarray:
    # half-sample reflection repeats with period 2n, so a circular filter on
    # [x, reversed(x)] equals reflect-mode convolution for any kernel length
    n = grid.shape[-1]
    ext = np.concatenate([grid, grid[..., ::-1]], axis=-1)
    if np.iscomplexobj(ext):
        return (_smooth_time(ext.real[..., :n], kernels)
                + 1j * _smooth_time(ext.imag[..., :n], kernels))
    return np.fft.irfft(np.fft.rfft(ext, axis=-1) * kernels, 2 * n, axis=-1)[..., :n]


def _smooth_scale(grid: np.ndarray, width: int) -> np.ndarray:
    half = width // 2
    pad = [(0, 0)] * grid.ndim
    pad[-2] = (half + 1, half)
    ext = np.pad(grid, pad, mode="symmetric")
    csum = np.cumsum(ext, axis=-2)
    return (csum[..., width:, :] - csum[..., :-width, :]) / width


def _dj_from_scales(scales: np.ndarray) -> float:
    if scales.size < 2:
        return 1.0
    return float(np.log2(scales[1] / scales[0]))


def smooth(grid, scales, dt: float = 1.0, dj: float | None = None) -> np.ndarray:
    """Smooth each row in time, then each column across scales.

    Row ``j`` is convolved with ``exp(-t^2 / (2 s_j^2))`` and columns with a
    boxcar of :func:`boxcar_width` rows. Both kernels have unit sum and the
    grid is reflected at every edge, so constants pass through unchanged and
    mass is conserved. Real input gives real output. Leading axes, if any,
    are treated as a batch; scales run along axis -2 and time along -1.
    """
    grid = np.asarray(grid)
    scales = np.asarray(scales, dtype=float)
    if grid.ndim < 2 or grid.shape[-2] != scales.size:
        raise GridMismatchError(f"grid rows ({grid.shape}) do not match {scales.size} scales")
    if dj is None:
        dj = _dj_from_scales(scales)
    n = grid.shape[-1]
    out = _smooth_time(grid, _time_kernels(n, tuple(scales.tolist()), float(dt)))
    width = boxcar_width(dj)
    if width > 1 and scales.size > 1:
        out = _smooth_scale(out, width)
    return out


def wtc(fx: WaveletField, fy: WaveletField, floor: float = 1e-300) -> CoherenceField:
    """Squared wavelet coherence of two fields on the same grid.

    ``r2 = |S(W^XY / s)|^2 / (S(|W^X|^2 / s) S(|W^Y|^2 / s))``. Cells where
    either smoothed auto-spectrum falls below ``floor`` get ``r2 = 0``.
    """
    _check_compatible(fx, fy)
    sxy, sxx, syy = smoothed_spectra(fx.coeffs, fy.coeffs, fx.scales, fx.params.dt, fx.params.dj)
    return _coherence_from_smoothed(fx, fy, sxy, sxx, syy, floor)


def smoothed_spectra(wx: np.ndarray, wy: np.ndarray, scales, dt: float, dj: float):
    """Smoothed scale-normalised cross and auto spectra of two coefficient grids."""
    inv_s = 1.0 / np.asarray(scales)[:, None]
    sxy = smooth(wx * np.conj(wy) * inv_s, scales, dt, dj)
    sxx = smooth((wx.real ** 2 + wx.imag ** 2) * inv_s, scales, dt, dj)
    syy = smooth((wy.real ** 2 + wy.imag ** 2) * inv_s, scales, dt, dj)
    return sxy, sxx, syy


def coherence_ratio(sxy, sxx, syy, floor: float = 1e-300) -> np.ndarray:
    ok = (sxx >= floor) & (syy >= floor)
    denom = np.where(ok, sxx * syy, 1.0)
    r2 = np.where(ok, (sxy.real ** 2 + sxy.imag ** 2) / denom, 0.0)
    return np.clip(r2, 0.0, 1.0)


def _coherence_from_smoothed(fx, fy, sxy, sxx, syy, floor) -> CoherenceField:
    return CoherenceField(
        r2=coherence_ratio(sxy, sxx, syy, floor),
        phase=wrap_phase(np.angle(sxy)),
        scales=fx.scales,
        periods=fx.periods,
        coi=fx.coi,
        names=(fx.series_name, fy.series_name),
        start=fx.start,
        step=fx.step,
    )
