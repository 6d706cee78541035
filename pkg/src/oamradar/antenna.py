"""Planar vortex antenna: phase allocation, far fields, radiation intensity, gain.

The panel is an N x M grid of isotropic elements in the y-z plane, backed by
an infinite conductor modeled through image theory. Helical (vortex) wavefronts
are imprinted by per-element phase offsets winding about a chosen center.

Angle conventions: ``theta`` is the polar angle off the panel normal
(boresight) and ``phi`` the azimuth about it, oriented so that a mode-1 vortex
field winds as ``exp(-1j * phi)``; the unit direction is
``(cos(theta), -sin(theta)*sin(phi), sin(theta)*cos(phi))`` in the panel's
(normal, y, z) frame. This matches the single-ring (Bessel) model below.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .numerics import J1_PEAK_ARG, DegenerateGridError, bessel_j

__all__ = [
    "PvaArray",
    "asymmetric_vortex_phases",
    "directivity_pattern",
    "element_offsets",
    "far_field_bessel",
    "far_field_exact",
    "gain_pattern",
    "mainlobe_angle",
    "make_pva",
    "radiation_intensity",
    "ring_model_mismatch",
    "symmetric_vortex_phases",
    "write_pattern_csv",
]


def wrap_phase(phi):
    """Wrap angles to [-pi, pi)."""
    return np.mod(np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


@dataclass(frozen=True)
class PvaArray:
    """Planar vortex antenna: element grid plus per-element phase offsets.

    ``aperture_radius`` is the effective ring radius used by the single-ring
    field model; by default the rms radial distance of the elements from the
    panel center, which best reproduces the exact element sum.
    """

    n_rows: int
    n_cols: int
    spacing: float
    wavelength: float
    element_height: float
    aperture_radius: float
    phase_offsets: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_rows < 2 or self.n_cols < 2:
            raise ValueError("array needs at least 2 rows and 2 columns")
        if self.spacing <= 0 or self.wavelength <= 0:
            raise ValueError("spacing and wavelength must be positive")
        if self.aperture_radius <= 0:
            raise ValueError("aperture_radius must be positive")
        offsets = np.asarray(self.phase_offsets, dtype=float)
        if offsets.shape != (self.n_rows, self.n_cols):
            raise ValueError(
                f"phase_offsets shape {offsets.shape} != ({self.n_rows}, {self.n_cols})"
            )
        if not np.all(np.isfinite(offsets)):
            raise ValueError("phase_offsets must be finite")
        object.__setattr__(self, "phase_offsets", wrap_phase(offsets))

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def n_elements(self) -> int:
        return self.n_rows * self.n_cols

    def with_phases(self, phase_offsets) -> "PvaArray":
        return replace(self, phase_offsets=np.asarray(phase_offsets, dtype=float))


def element_offsets(n_rows: int, n_cols: int, spacing: float):
    """Element (y, z) coordinates about the panel center, shape (n_rows, n_cols).

    Rows index z, columns index y.
    """
    z = (np.arange(n_rows) - (n_rows - 1) / 2.0) * spacing
    y = (np.arange(n_cols) - (n_cols - 1) / 2.0) * spacing
    zg, yg = np.meshgrid(z, y, indexing="ij")
    return yg, zg


def rms_element_radius(n_rows: int, n_cols: int, spacing: float) -> float:
    """RMS radial distance of the elements from the panel center."""
    yg, zg = element_offsets(n_rows, n_cols, spacing)
    return float(np.sqrt(np.mean(yg**2 + zg**2)))


def make_pva(
    n_rows: int = 16,
    n_cols: int = 16,
    wavelength: float = 0.031228380625,
    spacing: float | None = None,
    element_height: float | None = None,
    aperture_radius: float | None = None,
) -> PvaArray:
    """Build a panel with zero phase offsets and sensible defaults.

    Defaults: half-wavelength spacing (no grating lobes), quarter-wavelength
    element height (flat image-theory factor over the paraxial cone), and the
    rms element radius as the effective ring radius. The default wavelength
    corresponds to a 9.6 GHz carrier.
    """
    if spacing is None:
        spacing = wavelength / 2.0
    if element_height is None:
        element_height = wavelength / 4.0
    if aperture_radius is None:
        aperture_radius = rms_element_radius(n_rows, n_cols, spacing)
    return PvaArray(
        n_rows=n_rows,
        n_cols=n_cols,
        spacing=spacing,
        wavelength=wavelength,
        element_height=element_height,
        aperture_radius=aperture_radius,
        phase_offsets=np.zeros((n_rows, n_cols)),
    )


def _vortex_phases(array: PvaArray, mode: int, depth: float, center_y: float, center_z: float):
    if mode != 1:
        raise ValueError("only the single vortex mode (mode=1) is modeled")
    if not 0.0 < depth <= 1.0:
        raise ValueError(f"modulation depth must be in (0, 1], got {depth}")
    yg, zg = element_offsets(array.n_rows, array.n_cols, array.spacing)
    return wrap_phase(depth * mode * np.arctan2(yg - center_y, zg - center_z))


def symmetric_vortex_phases(array: PvaArray, mode: int = 1, depth: float = 1.0):
    """Vortex phase offsets winding about the geometric panel center.

    Each element gets ``wrap(depth * mode * atan2(y, z))``; the phase winds
    ``depth * mode * 2*pi`` per turn around the center.
    """
    return _vortex_phases(array, mode, depth, 0.0, 0.0)


def asymmetric_vortex_phases(
    array: PvaArray, mode: int = 1, depth: float = 1.0, shift=(0.0, 0.0)
):
    """Vortex phase offsets with the winding center displaced by (dy, dz).

    The displaced center must stay inside the element hull; shifting it onto
    or past the panel edge is rejected.
    """
    dy, dz = float(shift[0]), float(shift[1])
    half_y = (array.n_cols - 1) / 2.0 * array.spacing
    half_z = (array.n_rows - 1) / 2.0 * array.spacing
    if abs(dy) >= half_y or abs(dz) >= half_z:
        raise ValueError(
            f"vortex centroid shift ({dy:g}, {dz:g}) m falls outside the panel "
            f"(half extent {half_y:g} x {half_z:g} m)"
        )
    return _vortex_phases(array, mode, depth, dy, dz)


def reflector_factor(array: PvaArray, theta, k: float | None = None):
    """Image-theory factor for elements raised above an infinite conductor."""
    if k is None:
        k = array.wavenumber
    return 2.0 * np.sin(k * array.element_height * np.cos(np.asarray(theta, dtype=float)))


def far_field_exact(array: PvaArray, theta, phi, k: float | None = None, include_reflector: bool = True):
    """Exact element-sum far field, normalized by the element count.

    Parameters
    ----------
    array : PvaArray
        Panel geometry and phase offsets.
    theta, phi : array_like
        Broadcastable polar/azimuth angles (radians) off/about boresight.
    k : float, optional
        Wavenumber; defaults to the array's carrier wavenumber.
    include_reflector : bool
        Multiply by the image-theory reflector factor (default). Disable to
        isolate the bare array factor.

    Returns
    -------
    ndarray
        Complex field, broadcast shape of ``theta``/``phi``.
    """
    if k is None:
        k = array.wavenumber
    if abs(k * array.spacing) >= 2.0 * np.pi:
        warnings.warn(
            f"element spacing {array.spacing:g} m exceeds one wavelength at k={k:g}; "
            "grating lobes will alias the pattern",
            stacklevel=2,
        )
    th = np.asarray(theta, dtype=float)
    ph = np.asarray(phi, dtype=float)
    th, ph = np.broadcast_arrays(th, ph)
    sin_th = np.sin(th)
    ry = (-sin_th * np.sin(ph)).ravel()
    rz = (sin_th * np.cos(ph)).ravel()
    yg, zg = element_offsets(array.n_rows, array.n_cols, array.spacing)
    y_flat = yg.ravel()
    z_flat = zg.ravel()
    excite = np.exp(1j * array.phase_offsets.ravel())
    out = np.empty(ry.size, dtype=np.complex128)
    chunk = max(1, 4_000_000 // max(y_flat.size, 1))  # bound the scratch matrix
    for lo in range(0, ry.size, chunk):
        hi = min(lo + chunk, ry.size)
        geom = np.outer(ry[lo:hi], y_flat) + np.outer(rz[lo:hi], z_flat)
        out[lo:hi] = np.exp(-1j * k * geom) @ excite
    out = out.reshape(th.shape) / array.n_elements
    if include_reflector:
        out = out * reflector_factor(array, th, k)
    return out


def far_field_bessel(mode: int, aperture_radius: float, k: float, theta, phi, n_elements: int):
    """Single-ring model of the vortex far field.

    ``n_elements * j**(-mode) * exp(-1j*mode*phi) * J_mode(k*a*sin(theta))``;
    the range phase is handled by the scene geometry, not here.
    """
    if mode != 1:
        raise ValueError("only the single vortex mode (mode=1) is modeled")
    th = np.asarray(theta, dtype=float)
    ph = np.asarray(phi, dtype=float)
    radial = bessel_j(mode, k * aperture_radius * np.sin(th))
    return n_elements * (1j ** (-mode)) * np.exp(-1j * mode * ph) * radial


def radiation_intensity(mode: int, aperture_radius: float, k: float, theta, n_elements: int):
    """Ring-model radiation intensity, (N*M)^2 * J1(k a sin(theta))^2."""
    if mode != 1:
        raise ValueError("only the single vortex mode (mode=1) is modeled")
    radial = bessel_j(1, k * aperture_radius * np.sin(np.asarray(theta, dtype=float)))
    return (n_elements**2) * radial**2


def mainlobe_angle(k: float, aperture_radius: float) -> float:
    """Polar angle of the mainlobe ring, asin(j'_{1,1} / (k a))."""
    s = J1_PEAK_ARG / (k * aperture_radius)
    if s >= 1.0:
        raise ValueError("aperture too small: mainlobe ring angle undefined")
    return float(np.arcsin(s))


def directivity_pattern(field_values, theta, phi):
    """Directivity over a (theta, phi) grid by trapezoidal integration.

    Parameters
    ----------
    field_values : ndarray, shape (len(theta), len(phi))
        Complex or real field samples. The grid is assumed to cover the
        entire radiating domain (hemisphere for reflector-backed panels).
    theta, phi : 1D arrays
        Grid axes in radians; ``phi`` may omit the 2*pi wrap point.

    Returns
    -------
    (gain_dbi, peak_dbi)
        Gain grid in dBi and its peak value.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    power = np.abs(np.asarray(field_values)) ** 2
    if power.shape != (theta.size, phi.size):
        raise ValueError("field grid shape must be (len(theta), len(phi))")
    if not np.any(power > 0):
        raise DegenerateGridError("all-zero field: directivity undefined")
    n_phi = phi.size
    # close the azimuth loop if the wrap sample is missing
    closed_phi, closed_power = phi, power
    if phi[-1] - phi[0] < 2.0 * np.pi - 1e-9:
        closed_phi = np.append(phi, phi[0] + 2.0 * np.pi)
        closed_power = np.concatenate([power, power[:, :1]], axis=1)
    integrand = closed_power * np.sin(theta)[:, None]
    total = np.trapezoid(np.trapezoid(integrand, x=closed_phi, axis=1), x=theta)
    gain = 4.0 * np.pi * power[:, :n_phi] / total
    gain_dbi = 10.0 * np.log10(np.maximum(gain, 1e-300))
    return gain_dbi, float(gain_dbi.max())


def gain_pattern(array: PvaArray, k: float | None = None, theta_step_deg: float = 0.5, phi_step_deg: float = 1.0):
    """Hemisphere gain pattern of the panel.

    Returns ``(theta, phi, gain_dbi, peak_dbi)`` with 1D axes in radians.
    """
    theta = np.radians(np.arange(0.0, 90.0 + 1e-9, theta_step_deg))
    phi = np.radians(np.arange(0.0, 360.0, phi_step_deg))
    field_grid = far_field_exact(array, theta[:, None], phi[None, :], k=k)
    gain_dbi, peak = directivity_pattern(field_grid, theta, phi)
    return theta, phi, gain_dbi, peak


def ring_model_mismatch(
    array: PvaArray,
    k: float | None = None,
    theta_max_deg: float = 10.0,
    n_theta: int = 201,
    n_phi: int = 144,
):
    """Relative L2 mismatch between the element sum and the ring model.

    The exact field (bare array factor) is reduced to its azimuth-coherent
    radial profile by stripping the ``exp(-1j*phi)`` winding and averaging
    over azimuth, then compared against ``J1(k a sin(theta))`` with a single
    fitted complex scale. The result is the solid-angle-weighted relative L2
    residual over ``theta <= theta_max_deg``.
    """
    if k is None:
        k = array.wavenumber
    theta = np.radians(np.linspace(0.0, theta_max_deg, n_theta))
    phi = np.radians(np.linspace(0.0, 360.0, n_phi, endpoint=False))
    field_grid = far_field_exact(
        array, theta[:, None], phi[None, :], k=k, include_reflector=False
    )
    profile = (field_grid * np.exp(1j * phi)[None, :]).mean(axis=1)
    model = (1.0 / 1j) * bessel_j(1, k * array.aperture_radius * np.sin(theta))
    w = np.sqrt(np.clip(np.sin(theta), 1e-12, None))
    scale = np.vdot(w * model, w * profile) / np.vdot(w * model, w * model)
    resid = np.linalg.norm(w * (profile - scale * model))
    return float(resid / np.linalg.norm(w * profile)), complex(scale)


def write_pattern_csv(path, theta, phi, gain_dbi, field_grid):
    """Dump a pattern grid as CSV: theta_deg, phi_deg, gain_dbi, field_re, field_im."""
    th_deg = np.degrees(theta)
    ph_deg = np.degrees(phi)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("theta_deg,phi_deg,gain_dbi,field_re,field_im\n")
        for i, td in enumerate(th_deg):
            for j, pd in enumerate(ph_deg):
                v = field_grid[i, j]
                fh.write(f"{td:.6g},{pd:.6g},{gain_dbi[i, j]:.6g},{v.real:.9g},{v.imag:.9g}\n")
