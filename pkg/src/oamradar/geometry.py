"""Two-satellite geostationary geometry, scatterers, and scene presets.

Scene frame: right-handed Cartesian with the origin at the scene center on a
flat ground plane; ``x`` is ground range (the horizontal direction of the
satellites' mean line of sight), ``y`` runs along the orbital arc (azimuth),
``z`` is height.

Each platform carries two pointing references:

* ``boresight`` — the line of sight to the scene center, used for the
  (range, theta, phi) look geometry.
* ``vortex_axis`` — the helical-beam null axis. The two axes are squinted so
  that each pierces the ground at its own reference point, offset from the
  scene center by the mainlobe ring radius and rotated by +-baseline/2 about
  ground range. The scene then sits on both mainlobe rings (never in a null),
  and the pair of ring-azimuth coordinates forms an invertible map of the
  ground plane: the two-axis overlap is what makes 2D imaging possible, and
  it degenerates exactly when the baseline closes to zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.optimize import brentq

from .antenna import mainlobe_angle, rms_element_radius

__all__ = [
    "EARTH_RADIUS_M",
    "GEO_ALTITUDE_M",
    "GeoPlatform",
    "GeometryWarning",
    "Scatterer",
    "SceneFrame",
    "case1_targets",
    "case2_scene",
    "grid25_targets",
    "look_geometry",
    "pauli_channels",
    "platform_positions",
    "vortex_geometry",
]

EARTH_RADIUS_M = 6.371e6
GEO_ALTITUDE_M = 3.6e7

# Ring angle of the default 16x16 half-wavelength panel (wavelength-free).
DEFAULT_RING_ANGLE_RAD = mainlobe_angle(2.0 * np.pi, rms_element_radius(16, 16, 0.5))

POLARIMETRIC_CHANNELS = ("HH", "HV", "VH", "VV")


class GeometryWarning(UserWarning):
    """Geometry outside the validated envelope (still computable)."""


class DegenerateGeometryError(ValueError):
    """Geometry that destroys the interferometric observable."""


def _unit(v):
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector has no direction")
    return v / n


@dataclass(frozen=True)
class GeoPlatform:
    """One satellite of the interferometric pair, in the scene frame."""

    role: str
    orbital_angle_deg: float
    altitude_m: float
    position: np.ndarray = field(repr=False)
    boresight: np.ndarray = field(repr=False)
    vortex_axis: np.ndarray = field(repr=False)
    axis_ground_point: np.ndarray = field(repr=False)
    transverse_y: np.ndarray = field(repr=False)
    transverse_z: np.ndarray = field(repr=False)
    ring_radius: float = 0.0
    bearing_reference: float = 0.0

    @property
    def slant_range(self) -> float:
        return float(np.linalg.norm(self.position))


def _boresight_frame(boresight):
    """Transverse basis (y_b, z_b) about a boresight, z_b toward ground range."""
    xref = np.array([1.0, 0.0, 0.0])
    zb = xref - (xref @ boresight) * boresight
    if np.linalg.norm(zb) < 1e-12:
        xref = np.array([0.0, 0.0, 1.0])
        zb = xref - (xref @ boresight) * boresight
    zb = _unit(zb)
    yb = np.cross(boresight, zb)
    return yb, zb


def _make_platform(role, orbital_angle_deg, altitude_m, position, aim_point, ring_angle_rad):
    """Assemble a platform whose vortex axis is squinted to ``aim_point``."""
    boresight = _unit(-position)

    def off_axis(t):
        return float(np.arccos(np.clip(_unit(t * aim_point - position) @ boresight, -1.0, 1.0)))

    # ground range of the axis pierce point along the aim direction
    upper = 1.0
    while off_axis(upper) < ring_angle_rad:
        upper *= 2.0
        if upper > 1e10:
            raise ValueError("cannot place the vortex axis: ring angle unreachable")
    scale = brentq(lambda t: off_axis(t) - ring_angle_rad, 0.0, upper, xtol=1e-9)
    axis_point = scale * aim_point
    vortex_axis = _unit(axis_point - position)
    yv, zv = _boresight_frame(vortex_axis)
    # transverse offset of the scene center from the vortex axis
    t_center = -position - ((-position) @ vortex_axis) * vortex_axis
    rho = float(np.linalg.norm(t_center))
    chi0 = float(np.arctan2(-(t_center @ yv), t_center @ zv))
    return GeoPlatform(
        role=role,
        orbital_angle_deg=orbital_angle_deg,
        altitude_m=altitude_m,
        position=position,
        boresight=boresight,
        vortex_axis=vortex_axis,
        axis_ground_point=axis_point,
        transverse_y=yv,
        transverse_z=zv,
        ring_radius=rho,
        bearing_reference=chi0,
    )


def platform_positions(
    baseline_deg: float,
    altitude_m: float = GEO_ALTITUDE_M,
    scene_latitude_deg: float = 45.0,
    ring_angle_rad: float = DEFAULT_RING_ANGLE_RAD,
):
    """Place the master/slave pair on the geostationary arc.

    The satellites sit at +-baseline/2 along the arc about the scene
    meridian; both boresights intersect the scene center. The scene latitude
    sets the look obliquity (45 deg by default). Baselines outside the
    validated 2..25 deg envelope are accepted with a warning, and baselines
    below 10 deg are flagged as below the optimal range.

    Returns
    -------
    (master, slave) : GeoPlatform pair
    """
    if baseline_deg <= 0.0:
        raise DegenerateGeometryError(
            "zero baseline: the two vortex axes coincide and the "
            "interferometric observable is lost"
        )
    if not 2.0 <= baseline_deg <= 25.0:
        warnings.warn(
            f"baseline {baseline_deg:g} deg outside the validated 2-25 deg envelope",
            GeometryWarning,
            stacklevel=2,
        )
    elif baseline_deg < 10.0:
        warnings.warn(
            f"baseline {baseline_deg:g} deg below the optimal 10-25 deg range",
            GeometryWarning,
            stacklevel=2,
        )

    lat = np.radians(scene_latitude_deg)
    r_orb = EARTH_RADIUS_M + altitude_m
    scene_ecef = EARTH_RADIUS_M * np.array([np.cos(lat), 0.0, np.sin(lat)])
    up = _unit(scene_ecef)
    east = np.array([0.0, 1.0, 0.0])
    north = np.cross(up, east)

    half = np.radians(baseline_deg) / 2.0
    rel = []
    for sign in (+1.0, -1.0):
        pos_ecef = r_orb * np.array([np.cos(sign * half), np.sin(sign * half), 0.0])
        d = pos_ecef - scene_ecef
        rel.append(np.array([d @ north, d @ east, d @ up]))
    # rotate the local frame so the mean horizontal LOS direction is +x
    mean_h = (rel[0] + rel[1]) / 2.0
    mean_h[2] = 0.0
    xdir = _unit(mean_h)
    rot = np.array([[xdir[0], xdir[1], 0.0], [-xdir[1], xdir[0], 0.0], [0.0, 0.0, 1.0]])
    positions = [rot @ r for r in rel]

    platforms = []
    for (sign, role, pos) in ((+1.0, "master", positions[0]), (-1.0, "slave", positions[1])):
        aim = np.array([np.cos(half), sign * np.sin(half), 0.0])
        platforms.append(
            _make_platform(role, sign * baseline_deg / 2.0, altitude_m, pos, aim, ring_angle_rad)
        )
    return platforms[0], platforms[1]


def look_geometry(platform: GeoPlatform, position):
    """Slant range and antenna-frame angles of a point, about the boresight.

    Returns ``(r, theta, phi)``: Euclidean distance, polar angle off the
    boresight, and azimuth about it (oriented like the antenna module's
    direction convention).
    """
    p = np.asarray(position, dtype=float)
    d = p - platform.position
    r = float(np.linalg.norm(d))
    dn = d / r
    theta = float(np.arccos(np.clip(dn @ platform.boresight, -1.0, 1.0)))
    yb, zb = _boresight_frame(platform.boresight)
    phi = float(np.arctan2(-(d @ yb), d @ zb))
    return r, theta, phi


def vortex_geometry(platform: GeoPlatform, position):
    """Range, off-axis angle, and ring-azimuth arc offset about the vortex axis.

    Returns ``(r, theta_v, u)`` where ``theta_v`` is the polar angle off the
    vortex axis and ``u`` (meters) is the transverse arc coordinate of the
    point about the axis, measured from the scene center at the center's
    transverse radius. ``u`` is the coordinate the stepped vortex modulation
    reads out; it is what makes a target imageable.
    """
    p = np.asarray(position, dtype=float)
    d = p - platform.position
    r = float(np.linalg.norm(d))
    theta_v = float(np.arccos(np.clip((d / r) @ platform.vortex_axis, -1.0, 1.0)))
    t = d - (d @ platform.vortex_axis) * platform.vortex_axis
    chi = np.arctan2(-(t @ platform.transverse_y), t @ platform.transverse_z)
    dchi = (chi - platform.bearing_reference + np.pi) % (2.0 * np.pi) - np.pi
    return r, theta_v, float(platform.ring_radius * dchi)


def ground_slant_range(platform: GeoPlatform, position) -> float:
    """Slant range to the ground-plane projection of a point."""
    p = np.asarray(position, dtype=float)
    return float(np.linalg.norm(np.array([p[0], p[1], 0.0]) - platform.position))


@dataclass(frozen=True)
class Scatterer:
    """Point scatterer: position plus a reciprocal 2x2 scattering matrix."""

    position: np.ndarray
    scattering_matrix: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise ValueError("position must be a finite (x, y, z) triple")
        s = np.asarray(self.scattering_matrix, dtype=np.complex128)
        if s.shape != (2, 2) or not np.all(np.isfinite(s)):
            raise ValueError("scattering_matrix must be a finite 2x2 complex matrix")
        scale = max(np.max(np.abs(s)), 1.0)
        if abs(s[0, 1] - s[1, 0]) > 1e-9 * scale:
            raise ValueError("non-reciprocal scattering matrix: HV must equal VH")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "scattering_matrix", s)

    def amplitude(self, channel: str) -> complex:
        i = POLARIMETRIC_CHANNELS.index(channel)
        return complex(self.scattering_matrix[i // 2, i % 2])


def pauli_channels(scattering_matrix):
    """Pauli decomposition (odd-bounce, even-bounce, volume) of a 2x2 matrix.

    Returns ``((HH+VV)/sqrt2, (HH-VV)/sqrt2, sqrt2*HV)``; non-reciprocal
    input is rejected.
    """
    s = np.asarray(scattering_matrix, dtype=np.complex128)
    if s.shape != (2, 2):
        raise ValueError("scattering matrix must be 2x2")
    scale = max(np.max(np.abs(s)), 1.0)
    if abs(s[0, 1] - s[1, 0]) > 1e-9 * scale:
        raise ValueError("non-reciprocal scattering matrix: HV must equal VH")
    rt2 = np.sqrt(2.0)
    return (
        complex((s[0, 0] + s[1, 1]) / rt2),
        complex((s[0, 0] - s[1, 1]) / rt2),
        complex(rt2 * s[0, 1]),
    )


@dataclass(frozen=True)
class SceneFrame:
    """Ground-plane patch: full extents and grid spacing, in meters."""

    extent_x: float = 5000.0
    extent_y: float = 5000.0
    spacing: float = 0.25

    def __post_init__(self):
        if self.extent_x <= 0 or self.extent_y <= 0 or self.spacing <= 0:
            raise ValueError("scene extents and spacing must be positive")

    def axes(self):
        nx = int(round(self.extent_x / self.spacing)) + 1
        ny = int(round(self.extent_y / self.spacing)) + 1
        x = (np.arange(nx) - (nx - 1) / 2.0) * self.spacing
        y = (np.arange(ny) - (ny - 1) / 2.0) * self.spacing
        return x, y


# --- canonical scene presets (artifact choices, desk scale) -----------------

ODD_BOUNCE = np.eye(2, dtype=complex)  # trihedral-like
EVEN_BOUNCE = np.diag([1.0 + 0j, -1.0 + 0j])  # dihedral-like
VOLUME = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)  # cross-pol


def grid25_targets(spacing: float = 1.0):
    """5x5 grid of unit odd-bounce point targets on the ground plane."""
    out = []
    for ix in range(-2, 3):
        for iy in range(-2, 3):
            out.append(Scatterer(np.array([ix * spacing, iy * spacing, 0.0]), ODD_BOUNCE))
    return out


def case1_targets(heights=(-1.2, 0.0, 1.5)):
    """Three isolated point targets stacked in height at the scene center."""
    return [Scatterer(np.array([0.0, 0.0, float(h)]), ODD_BOUNCE) for h in heights]


def case2_scene(seed: int = 0, foliage_count: int = 10):
    """Polarimetric scene: flat-ground, foliage, and building cells.

    Returns ``(targets, cells)`` where ``cells`` maps the cell names
    ``ground`` / ``foliage`` / ``building`` to their (x, y) positions. The
    foliage cell holds ``foliage_count`` seeded random cross-pol scatterers
    spread over a vertical extent; the building is two stacked even-bounce
    scatterers.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    cells = {
        "ground": (-0.9, -0.9),
        "foliage": (0.9, -0.9),
        "building": (0.0, 0.9),
    }
    targets = [Scatterer(np.array([*cells["ground"], 0.0]), ODD_BOUNCE)]
    fx, fy = cells["foliage"]
    for _ in range(foliage_count):
        dz = rng.uniform(0.3, 2.3)
        amp = rng.uniform(0.5, 1.0)
        targets.append(Scatterer(np.array([fx, fy, dz]), amp * VOLUME))
    bx, by = cells["building"]
    targets.append(Scatterer(np.array([bx, by, 0.0]), EVEN_BOUNCE))
    targets.append(Scatterer(np.array([bx, by, 1.8]), EVEN_BOUNCE))
    return targets, cells
