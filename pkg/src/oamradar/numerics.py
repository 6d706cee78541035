"""Shared numeric kernel: Bessel functions, unitary 2D DFT, peak metrology.

All operations are pure and deterministic; none keeps mutable state, so they
are safe to call concurrently on disjoint inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "DegenerateGridError",
    "PeakReport",
    "bessel_j",
    "dft2",
    "ensure_complex_grid",
    "measure_peak",
]

MAX_BESSEL_ORDER = 10
MAX_BESSEL_ARG = 1.0e4

# First maximum of J1 (first zero of J1'), frozen from scipy.special.jnp_zeros.
J1_PEAK_ARG = 1.8411837813406593


class DegenerateGridError(ValueError):
    """Raised when an input grid is degenerate for the requested operation."""


def bessel_j(order, x):
    """Bessel function of the first kind J_order(x).

    Parameters
    ----------
    order : int
        Non-negative integer order, at most ``MAX_BESSEL_ORDER``.
    x : float or ndarray
        Argument(s); |x| must not exceed ``MAX_BESSEL_ARG``.

    Returns
    -------
    float or ndarray
        J_order(x), accurate to better than 1e-12 absolute on the
        supported domain.
    """
    if not isinstance(order, (int, np.integer)):
        raise ValueError(f"bessel order must be an integer, got {order!r}")
    if order < 0 or order > MAX_BESSEL_ORDER:
        raise ValueError(f"bessel order {order} outside supported range [0, {MAX_BESSEL_ORDER}]")
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > MAX_BESSEL_ARG):
        raise ValueError(f"|x| exceeds supported bound {MAX_BESSEL_ARG:g}")
    out = special.jv(order, arr)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def ensure_complex_grid(grid, name: str = "grid") -> np.ndarray:
    """Validate and return a finite 2D complex128 array."""
    arr = np.asarray(grid, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite samples")
    return arr


def dft2(grid, direction: str = "forward") -> np.ndarray:
    """Unitary 2D discrete Fourier transform.

    Both directions use the 1/sqrt(rows*cols) normalization, so
    ``dft2(dft2(x), "inverse")`` returns ``x`` and Parseval holds exactly
    up to rounding.
    """
    arr = ensure_complex_grid(grid)
    if direction == "forward":
        return np.fft.fft2(arr, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft2(arr, norm="ortho")
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


@dataclass(frozen=True)
class PeakReport:
    """Mainlobe metrology of a focused profile or image.

    ``width_neg3db`` holds one half-power width per array axis, in (fractional)
    samples, measured on the power profile through the peak; a singleton axis
    reports ``nan``. ``pslr_db`` is the peak sidelobe ratio (<= 0) or ``None``
    when no sidelobe exists outside the mainlobe. ``tie`` marks inputs whose
    global maximum is attained at more than one sample; the reported index is
    then the lexicographically smallest.
    """

    peak_index: tuple
    peak_mag_db: float
    width_neg3db: tuple
    pslr_db: float | None
    tie: bool = False

    @property
    def no_sidelobe(self) -> bool:
        return self.pslr_db is None


def _half_power_width(power: np.ndarray, peak: int) -> float:
    """-3 dB full width around ``peak`` via linear interpolation on power."""
    half = power[peak] / 2.0
    n = power.size
    if n < 2:
        return float("nan")

    def crossing(step: int) -> float:
        i = peak
        while 0 <= i + step < n and power[i + step] >= half:
            i += step
        if not 0 <= i + step < n:
            return float(abs(i - peak))  # clamped at the boundary
        lo, hi = power[i], power[i + step]
        frac = (lo - half) / (lo - hi)
        return abs(i - peak) + frac

    return crossing(-1) + crossing(+1)


def _mainlobe_bounds(power: np.ndarray, peak: int) -> tuple[int, int]:
    """Indices of the first local minima on each side of ``peak``."""
    n = power.size
    lo = peak
    while lo > 0 and power[lo - 1] < power[lo]:
        lo -= 1
    hi = peak
    while hi < n - 1 and power[hi + 1] < power[hi]:
        hi += 1
    return lo, hi


def measure_peak(profile_or_image) -> PeakReport:
    """Locate the global magnitude peak and report -3 dB widths and PSLR.

    Accepts a 1D profile or a 2D image (complex or real). Widths are
    measured on the power (magnitude-squared) cuts through the peak along
    each axis. The PSLR search excludes the mainlobe box bounded by the
    first local minima along each axis cut.
    """
    arr = np.asarray(profile_or_image, dtype=np.complex128)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]
    arr = ensure_complex_grid(arr, "profile_or_image")
    mag = np.abs(arr)
    if not np.any(mag > 0):
        raise DegenerateGridError("all-zero input has no peak")

    flat_peak = int(np.argmax(mag))  # argmax is lexicographic-first on ties
    peak_idx = np.unravel_index(flat_peak, mag.shape)
    peak_mag = mag[peak_idx]
    tie = int(np.count_nonzero(mag == peak_mag)) > 1

    power = mag**2
    widths = []
    bounds = []
    for axis in range(2):
        cut = power[:, peak_idx[1]] if axis == 0 else power[peak_idx[0], :]
        if cut.size == 1:
            widths.append(float("nan"))
            bounds.append((0, 0))
        else:
            widths.append(_half_power_width(cut, peak_idx[axis]))
            bounds.append(_mainlobe_bounds(cut, peak_idx[axis]))

    mask = np.zeros(mag.shape, dtype=bool)
    (r0, r1), (c0, c1) = bounds
    mask[r0 : r1 + 1, c0 : c1 + 1] = True
    outside = mag[~mask]
    pslr_db: float | None = None
    if outside.size and np.max(outside) > 0:
        pslr_db = float(20.0 * np.log10(np.max(outside) / peak_mag))

    if squeeze:
        return PeakReport(
            peak_index=(int(peak_idx[1]),),
            peak_mag_db=float(20.0 * np.log10(peak_mag)),
            width_neg3db=(widths[1],),
            pslr_db=pslr_db,
            tie=tie,
        )
    return PeakReport(
        peak_index=(int(peak_idx[0]), int(peak_idx[1])),
        peak_mag_db=float(20.0 * np.log10(peak_mag)),
        width_neg3db=(widths[0], widths[1]),
        pslr_db=pslr_db,
        tie=tie,
    )
