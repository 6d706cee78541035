"""Scenario configs: YAML schema, validation, and builders for the pipelines.

The scenario file is flat key/value YAML with one nested target list and a
``schema_version`` key. Every module precondition is checked here, before any
computation, with the offending field named in the error message.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import antenna
from .geometry import (
    Scatterer,
    case1_targets,
    case2_scene,
    grid25_targets,
    platform_positions,
)
from .waveform import build_chirp_plan, build_oam_sweep

__all__ = [
    "ArraySpec",
    "ChirpSpec",
    "OamSpec",
    "Scenario",
    "ScenarioError",
    "SceneSpec",
    "load_scenario",
    "scenario_from_dict",
]

SCHEMA_VERSION = 1
PRESETS = ("grid25", "case1", "case2")
TABLE2_BANDWIDTHS_HZ = (20e6, 60e6, 150e6, 250e6, 400e6, 500e6)
FIG11_BASELINES_DEG = (2.0, 5.0, 8.0, 12.0, 16.0, 18.0, 20.0, 22.0, 25.0)
FIG12_OAM_BANDWIDTHS = (0.05, 0.10, 0.15, 0.18, 0.23, 0.26, 0.30, 0.40, 0.50)


class ScenarioError(ValueError):
    """Invalid scenario configuration; the message names the failing field."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


def _require(condition: bool, field_path: str, message: str) -> None:
    if not condition:
        raise ScenarioError(field_path, message)


@dataclass
class ArraySpec:
    n_rows: int = 16
    n_cols: int = 16
    spacing_m: float | None = None  # default: half wavelength
    element_height_m: float | None = None  # default: quarter wavelength
    aperture_radius_m: float | None = None  # default: rms element radius
    phase_strategy: str = "symmetric"
    depth: float = 1.0
    shift_y_m: float = 0.0
    shift_z_m: float = 0.0


@dataclass
class OamSpec:
    k_steps: int = 128
    b_oam: float = 0.5
    mode: int = 1


@dataclass
class ChirpSpec:
    k_f: int = 25
    span_hz: float = 500e6


@dataclass
class SceneSpec:
    preset: str | None = "grid25"
    targets: list = field(default_factory=list)
    spacing_m: float = 0.25
    grid_spacing_m: float = 1.0  # target pitch of the grid25 preset


@dataclass
class Scenario:
    schema_version: int = SCHEMA_VERSION
    carrier_hz: float = 9.6e9
    baseline_deg: float = 25.0
    altitude_m: float = 3.6e7
    scene_latitude_deg: float = 45.0
    seed: int = 0
    snr_db: float | None = None
    array: ArraySpec = field(default_factory=ArraySpec)
    oam: OamSpec = field(default_factory=OamSpec)
    chirp: ChirpSpec | None = field(default_factory=ChirpSpec)
    scene: SceneSpec = field(default_factory=SceneSpec)

    # -- validation ---------------------------------------------------------

    def validate(self) -> "Scenario":
        _require(self.schema_version == SCHEMA_VERSION, "schema_version",
                 f"unsupported version {self.schema_version}, expected {SCHEMA_VERSION}")
        _require(self.carrier_hz > 0, "carrier_hz", "must be positive")
        _require(self.baseline_deg > 0, "baseline_deg",
                 "must be positive: a zero baseline loses the interferometric effect")
        _require(self.altitude_m > 0, "altitude_m", "must be positive")
        _require(-90.0 < self.scene_latitude_deg < 90.0, "scene_latitude_deg",
                 "must lie strictly between -90 and 90")
        _require(isinstance(self.seed, int) and self.seed >= 0, "seed",
                 "must be a non-negative integer")
        if self.snr_db is not None:
            _require(np.isfinite(self.snr_db), "snr_db", "must be finite or null")

        a = self.array
        _require(a.n_rows >= 2, "array.n_rows", "needs at least 2 rows")
        _require(a.n_cols >= 2, "array.n_cols", "needs at least 2 columns")
        if a.spacing_m is not None:
            _require(a.spacing_m > 0, "array.spacing_m", "must be positive")
        if a.element_height_m is not None:
            _require(a.element_height_m > 0, "array.element_height_m", "must be positive")
        if a.aperture_radius_m is not None:
            _require(a.aperture_radius_m > 0, "array.aperture_radius_m", "must be positive")
        _require(a.phase_strategy in ("symmetric", "asymmetric"), "array.phase_strategy",
                 "must be 'symmetric' or 'asymmetric'")
        _require(0.0 < a.depth <= 1.0, "array.depth", "must be in (0, 1]")
        spacing = a.spacing_m if a.spacing_m is not None else (3e8 / self.carrier_hz) / 2
        half_y = (a.n_cols - 1) / 2.0 * spacing
        half_z = (a.n_rows - 1) / 2.0 * spacing
        if a.phase_strategy == "asymmetric":
            _require(abs(a.shift_y_m) < half_y and abs(a.shift_z_m) < half_z,
                     "array.shift_y_m", "centroid shift must stay inside the panel")

        o = self.oam
        _require(o.k_steps >= 2, "oam.k_steps", "needs at least 2 steps")
        _require(0.0 < o.b_oam <= 0.5, "oam.b_oam", "must be in (0, 0.5]")
        _require(o.mode == 1, "oam.mode", "only the single vortex mode (1) is modeled")

        if self.chirp is not None:
            _require(self.chirp.k_f >= 2, "chirp.k_f", "needs at least 2 frequency steps")
            _require(self.chirp.span_hz > 0, "chirp.span_hz", "must be positive")
            _require(self.carrier_hz > self.chirp.span_hz / 2.0, "chirp.span_hz",
                     "span exceeds twice the carrier")

        sc = self.scene
        if sc.preset is not None:
            _require(sc.preset in PRESETS, "scene.preset", f"must be one of {PRESETS}")
        else:
            _require(len(sc.targets) > 0, "scene.targets",
                     "scene is empty: give a preset or a target list")
        _require(sc.spacing_m > 0, "scene.spacing_m", "must be positive")
        _require(sc.grid_spacing_m > 0, "scene.grid_spacing_m", "must be positive")
        for i, t in enumerate(sc.targets):
            _require(isinstance(t, Scatterer), f"scene.targets[{i}]", "not a scatterer")
        return self

    # -- builders -----------------------------------------------------------

    @property
    def wavelength(self) -> float:
        from scipy.constants import c

        return c / self.carrier_hz

    def build_array(self) -> antenna.PvaArray:
        a = self.array
        arr = antenna.make_pva(
            n_rows=a.n_rows,
            n_cols=a.n_cols,
            wavelength=self.wavelength,
            spacing=a.spacing_m,
            element_height=a.element_height_m,
            aperture_radius=a.aperture_radius_m,
        )
        if a.phase_strategy == "symmetric":
            phases = antenna.symmetric_vortex_phases(arr, self.oam.mode, a.depth)
        else:
            phases = antenna.asymmetric_vortex_phases(
                arr, self.oam.mode, a.depth, (a.shift_y_m, a.shift_z_m)
            )
        return arr.with_phases(phases)

    def build_platforms(self):
        arr = self.build_array()
        ring = antenna.mainlobe_angle(arr.wavenumber, arr.aperture_radius)
        return platform_positions(
            self.baseline_deg,
            altitude_m=self.altitude_m,
            scene_latitude_deg=self.scene_latitude_deg,
            ring_angle_rad=ring,
        )

    def build_sweep(self):
        return build_oam_sweep(self.oam.k_steps, self.oam.b_oam, self.oam.mode)

    def build_chirp(self):
        if self.chirp is None:
            raise ScenarioError("chirp", "tomography requires a stepped-frequency plan")
        return build_chirp_plan(self.carrier_hz, self.chirp.span_hz, self.chirp.k_f)

    def build_targets(self):
        """Return (targets, named_cells); cells may be empty."""
        sc = self.scene
        if sc.preset == "grid25":
            return grid25_targets(sc.grid_spacing_m), {}
        if sc.preset == "case1":
            return case1_targets(), {}
        if sc.preset == "case2":
            return case2_scene(seed=self.seed)
        return list(sc.targets), {}

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        def target_dict(t: Scatterer) -> dict:
            s = t.scattering_matrix
            return {
                "x": float(t.position[0]),
                "y": float(t.position[1]),
                "z": float(t.position[2]),
                "hh": [s[0, 0].real, s[0, 0].imag],
                "hv": [s[0, 1].real, s[0, 1].imag],
                "vh": [s[1, 0].real, s[1, 0].imag],
                "vv": [s[1, 1].real, s[1, 1].imag],
            }

        out = {
            "schema_version": self.schema_version,
            "carrier_hz": self.carrier_hz,
            "baseline_deg": self.baseline_deg,
            "altitude_m": self.altitude_m,
            "scene_latitude_deg": self.scene_latitude_deg,
            "seed": self.seed,
            "snr_db": self.snr_db,
            "array": {
                "n_rows": self.array.n_rows,
                "n_cols": self.array.n_cols,
                "spacing_m": self.array.spacing_m,
                "element_height_m": self.array.element_height_m,
                "aperture_radius_m": self.array.aperture_radius_m,
                "phase_strategy": self.array.phase_strategy,
                "depth": self.array.depth,
                "shift_y_m": self.array.shift_y_m,
                "shift_z_m": self.array.shift_z_m,
            },
            "oam": {"k_steps": self.oam.k_steps, "b_oam": self.oam.b_oam, "mode": self.oam.mode},
            "chirp": None
            if self.chirp is None
            else {"k_f": self.chirp.k_f, "span_hz": self.chirp.span_hz},
            "scene": {
                "preset": self.scene.preset,
                "spacing_m": self.scene.spacing_m,
                "grid_spacing_m": self.scene.grid_spacing_m,
                "targets": [target_dict(t) for t in self.scene.targets],
            },
        }
        return out

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode("ascii")
        return hashlib.sha256(payload).hexdigest()


def _pop_section(data: dict, key: str, field_path: str) -> dict:
    section = data.pop(key, None)
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ScenarioError(field_path, "must be a mapping")
    return section


def _take(section: dict, spec_obj, field_path: str, casts: dict) -> None:
    for key, value in section.items():
        if key not in casts:
            raise ScenarioError(f"{field_path}.{key}", "unknown field")
        cast = casts[key]
        try:
            setattr(spec_obj, key, None if value is None else cast(value))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{field_path}.{key}", f"bad value {value!r}") from exc


def _parse_complex(entry, field_path: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise ScenarioError(field_path, "expected a number or [re, im] pair")


def _parse_targets(raw, field_path: str):
    targets = []
    for i, item in enumerate(raw):
        path = f"{field_path}[{i}]"
        if not isinstance(item, dict):
            raise ScenarioError(path, "must be a mapping")
        item = dict(item)
        try:
            pos = [float(item.pop("x")), float(item.pop("y")), float(item.pop("z", 0.0))]
        except KeyError as exc:
            raise ScenarioError(path, f"missing coordinate {exc}") from exc
        hh = _parse_complex(item.pop("hh", 0.0), f"{path}.hh")
        hv = _parse_complex(item.pop("hv", 0.0), f"{path}.hv")
        vv = _parse_complex(item.pop("vv", 0.0), f"{path}.vv")
        vh_raw = item.pop("vh", None)  # reciprocity default: mirror hv
        vh = hv if vh_raw is None else _parse_complex(vh_raw, f"{path}.vh")
        if item:
            raise ScenarioError(f"{path}.{next(iter(item))}", "unknown field")
        try:
            targets.append(Scatterer(np.array(pos), np.array([[hh, hv], [vh, vv]])))
        except ValueError as exc:
            raise ScenarioError(path, str(exc)) from exc
    return targets


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from a parsed YAML mapping."""
    if not isinstance(data, dict):
        raise ScenarioError("<root>", "scenario must be a mapping")
    data = dict(data)
    scn = Scenario(chirp=None)

    top_casts = {
        "schema_version": int,
        "carrier_hz": float,
        "baseline_deg": float,
        "altitude_m": float,
        "scene_latitude_deg": float,
        "seed": int,
        "snr_db": float,
    }
    array_sec = _pop_section(data, "array", "array")
    oam_sec = _pop_section(data, "oam", "oam")
    chirp_sec = data.pop("chirp", None)
    scene_sec = _pop_section(data, "scene", "scene")
    _take(data, scn, "<root>",
          {k: v for k, v in top_casts.items()})

    _take(array_sec, scn.array, "array", {
        "n_rows": int, "n_cols": int, "spacing_m": float, "element_height_m": float,
        "aperture_radius_m": float, "phase_strategy": str, "depth": float,
        "shift_y_m": float, "shift_z_m": float,
    })
    _take(oam_sec, scn.oam, "oam", {"k_steps": int, "b_oam": float, "mode": int})
    if chirp_sec is not None:
        if not isinstance(chirp_sec, dict):
            raise ScenarioError("chirp", "must be a mapping or null")
        scn.chirp = ChirpSpec()
        _take(chirp_sec, scn.chirp, "chirp", {"k_f": int, "span_hz": float})

    scene = SceneSpec(preset=None)
    raw_targets = scene_sec.pop("targets", None)
    _take(scene_sec, scene, "scene", {
        "preset": str, "spacing_m": float, "grid_spacing_m": float,
    })
    if raw_targets is not None:
        if scene.preset is not None:
            raise ScenarioError("scene.targets", "give either a preset or targets, not both")
        if not isinstance(raw_targets, list):
            raise ScenarioError("scene.targets", "must be a list")
        scene.targets = _parse_targets(raw_targets, "scene.targets")
    scn.scene = scene

    return scn.validate()


def load_scenario(path) -> Scenario:
    """Load and validate a scenario YAML file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError("<file>", f"not valid YAML: {exc}") from exc
    return scenario_from_dict(data if data is not None else {})
