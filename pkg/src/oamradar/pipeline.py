"""Batch pipelines behind the CLI: pattern, image, tomo, and sweep runs.

Every run writes into its own output directory and records a manifest with
per-stage timings and the sha256 of each emitted file. Sweeps fan out over a
thread pool; outputs are assembled and written in deterministic order, and
all noise streams are keyed by (seed, frequency step, channel, pair), so the
emitted bytes do not depend on the worker count.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__, antenna
from .geometry import ODD_BOUNCE, Scatterer, pauli_channels, platform_positions
from .gridio import RunManifest, write_csv_rows, write_manifest, write_oamg, write_pgm16
from .imaging import (
    CHANNELS,
    PAIRS,
    bearing_jacobian,
    focus_2d,
    ground_remap,
    ground_to_phase,
    matched_filter,
    reference_echo,
    synthesize_echo,
)
from .numerics import measure_peak
from .scenario import (
    FIG11_BASELINES_DEG,
    FIG12_OAM_BANDWIDTHS,
    TABLE2_BANDWIDTHS_HZ,
    Scenario,
    ScenarioError,
)
from .tomography import (
    classical_resolution,
    default_height_grid,
    mca_split,
    multilook_vector,
    steering_matrix,
    tomo_invert,
    tomo_resolution,
)
from .waveform import build_chirp_plan, build_epoch_schedule, build_oam_sweep, write_schedule_csv

__all__ = ["run_image", "run_pattern", "run_sweep", "run_tomo"]

SWEEP_DEFAULTS = {
    "baseline": FIG11_BASELINES_DEG,
    "oam_bw": FIG12_OAM_BANDWIDTHS,
    "chirp_bw": TABLE2_BANDWIDTHS_HZ,
}
PSF_PROBE_XY = (0.7, -0.4)  # off-center, off-lattice probe target
LADDER_SEPARATION_M = 1.0


@contextmanager
def _stage(manifest: RunManifest, name: str):
    t0 = time.perf_counter()
    yield
    manifest.add_stage(name, time.perf_counter() - t0)


def _new_manifest(scenario: Scenario, command: str) -> RunManifest:
    return RunManifest(
        scenario_hash=scenario.digest(), tool_version=__version__, command=command
    )


def _fan_out(tasks, threads: int):
    """Run (key, thunk) tasks, returning {key: result} independent of order."""
    if threads <= 1:
        return {key: thunk() for key, thunk in tasks}
    out = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [(key, pool.submit(thunk)) for key, thunk in tasks]
        for key, fut in futures:
            out[key] = fut.result()
    return out


def _emit_grid(manifest, outdir: Path, name: str, grid, quicklook: bool):
    path = outdir / name
    write_oamg(path, grid)
    manifest.add_file(outdir, path)
    if quicklook:
        ql = path.with_suffix(".pgm")
        write_pgm16(ql, np.abs(grid))
        manifest.add_file(outdir, ql)


def _emit_csv(manifest, outdir: Path, name: str, header, rows):
    path = outdir / name
    write_csv_rows(path, header, rows)
    manifest.add_file(outdir, path)


def _active_channels(targets):
    return [
        ch for ch in CHANNELS if any(abs(t.amplitude(ch)) > 0 for t in targets)
    ]


# --- pattern -----------------------------------------------------------------


def run_pattern(scenario: Scenario, outdir, threads: int = 1, quicklook: bool = False):
    """Gain and field patterns for the symmetric and asymmetric strategies."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = _new_manifest(scenario, "pattern")

    base = scenario.build_array()
    shift = (scenario.array.shift_y_m, scenario.array.shift_z_m)
    if shift == (0.0, 0.0):
        shift = (2.0 * base.spacing, 0.0)
    strategies = {
        "symmetric": base.with_phases(
            antenna.symmetric_vortex_phases(base, scenario.oam.mode, scenario.array.depth)
        ),
        "asymmetric": base.with_phases(
            antenna.asymmetric_vortex_phases(
                base, scenario.oam.mode, scenario.array.depth, shift
            )
        ),
    }

    metrics = []
    with _stage(manifest, "patterns"):
        results = _fan_out(
            [(name, (lambda a=arr: antenna.gain_pattern(a))) for name, arr in strategies.items()],
            threads,
        )
    with _stage(manifest, "emit"):
        for name in sorted(strategies):
            arr = strategies[name]
            theta, phi, gain_dbi, peak = results[name]
            field_grid = antenna.far_field_exact(arr, theta[:, None], phi[None, :])
            csv_path = outdir / f"pattern_{name}.csv"
            antenna.write_pattern_csv(csv_path, theta, phi, gain_dbi, field_grid)
            manifest.add_file(outdir, csv_path)
            _emit_grid(manifest, outdir, f"field_{name}.oamg", field_grid, quicklook)
            boresight = abs(antenna.far_field_exact(arr, 0.0, 0.0))
            ring_row = int(np.argmax(np.max(np.abs(field_grid), axis=1)))
            metrics.append(
                [
                    name,
                    f"{peak:.4f}",
                    f"{boresight:.6e}",
                    f"{np.degrees(theta[ring_row]):.3f}",
                ]
            )
        _emit_csv(
            manifest,
            outdir,
            "pattern_metrics.csv",
            ["strategy", "peak_gain_dbi", "boresight_field", "ring_theta_deg"],
            metrics,
        )
    write_manifest(outdir / "manifest.json", manifest)
    return manifest


# --- image -------------------------------------------------------------------


def _image_one_channel(scenario, master, slave, sweep, arr, targets, channel):
    f_c = scenario.carrier_hz
    raw = {}
    for pair in PAIRS:
        raw[pair] = synthesize_echo(
            targets,
            master,
            slave,
            sweep,
            f_c,
            arr.aperture_radius,
            channel=channel,
            pair=pair,
            snr_db=scenario.snr_db,
            seed=scenario.seed,
            carrier_hz=f_c,
        )
    ref = reference_echo(master, slave, sweep, f_c, arr.aperture_radius, carrier_hz=f_c)
    slc = focus_2d(matched_filter(raw["MS"], ref), sweep)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ground = ground_remap(slc, master, slave, spacing=scenario.scene.spacing_m)
    return raw, slc, ground


def _locate_targets(slc, targets, master, slave, jac, carrier_hz):
    """Per-target peak reports from the focused image."""
    jinv = np.linalg.inv(jac)
    rows = []
    halfwin = max(8, 3 * slc.pad_factor)
    for t in targets:
        phi_m, phi_s = ground_to_phase(master, slave, t.position, carrier_hz)
        i0, j0 = slc.nearest_bin(phi_m, phi_s)
        sl = (
            slice(max(0, i0 - halfwin), min(slc.data.shape[0], i0 + halfwin)),
            slice(max(0, j0 - halfwin), min(slc.data.shape[1], j0 + halfwin)),
        )
        sub = np.abs(slc.data[sl])
        di, dj = np.unravel_index(int(np.argmax(sub)), sub.shape)
        im, jm = sl[0].start + di, sl[1].start + dj
        est = jinv @ np.array([slc.phi_m_axis[im], slc.phi_s_axis[jm]])
        err = float(np.hypot(est[0] - t.position[0], est[1] - t.position[1]))
        report = measure_peak(slc.data[sl])
        rows.append(
            [
                f"{t.position[0]:.3f}",
                f"{t.position[1]:.3f}",
                f"{est[0]:.4f}",
                f"{est[1]:.4f}",
                f"{err:.5f}",
                f"{report.width_neg3db[0]:.3f}",
                f"{report.width_neg3db[1]:.3f}",
                "" if report.pslr_db is None else f"{report.pslr_db:.2f}",
            ]
        )
    return rows


def run_image(scenario: Scenario, outdir, threads: int = 1, quicklook: bool = False):
    """Raw echoes, focused and ground-remapped images, per-target peak reports."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = _new_manifest(scenario, "image")

    with _stage(manifest, "setup"):
        arr = scenario.build_array()
        master, slave = scenario.build_platforms()
        sweep = scenario.build_sweep()
        targets, _ = scenario.build_targets()
        if not targets:
            raise ScenarioError("scene", "scene is empty")
        channels = _active_channels(targets)
        jac = bearing_jacobian(master, slave, scenario.carrier_hz)

    with _stage(manifest, "synthesize+focus"):
        results = _fan_out(
            [
                (
                    ch,
                    (
                        lambda c=ch: _image_one_channel(
                            scenario, master, slave, sweep, arr, targets, c
                        )
                    ),
                )
                for ch in channels
            ],
            threads,
        )

    metrics = []
    with _stage(manifest, "emit"):
        schedule = build_epoch_schedule(
            sweep.k_steps, 1e-4, range_m=master.slant_range
        )
        sched_path = outdir / "epoch_schedule.csv"
        write_schedule_csv(sched_path, schedule, sweep)
        manifest.add_file(outdir, sched_path)
        for ch in channels:
            raw, slc, ground = results[ch]
            for pair in PAIRS:
                _emit_grid(
                    manifest, outdir, f"raw_{ch}_{pair}.oamg", raw[pair].data, quicklook
                )
            _emit_grid(manifest, outdir, f"slc_{ch}.oamg", slc.data, quicklook)
            _emit_grid(manifest, outdir, f"ground_{ch}.oamg", ground.data, quicklook)
            peak_rows = _locate_targets(
                slc, targets, master, slave, jac, scenario.carrier_hz
            )
            _emit_csv(
                manifest,
                outdir,
                f"peaks_{ch}.csv",
                [
                    "x_m",
                    "y_m",
                    "est_x_m",
                    "est_y_m",
                    "error_m",
                    "width_m_bins",
                    "width_s_bins",
                    "pslr_db",
                ],
                peak_rows,
            )
            worst = max(float(r[4]) for r in peak_rows)
            metrics.append(
                [ch, f"{ground.condition_number:.4f}", len(targets), f"{worst:.5f}"]
            )
        _emit_csv(
            manifest,
            outdir,
            "image_metrics.csv",
            ["channel", "condition_number", "n_targets", "worst_localization_m"],
            metrics,
        )
    write_manifest(outdir / "manifest.json", manifest)
    return manifest


# --- tomo ----------------------------------------------------------------------


def _tomo_stack(scenario, master, slave, sweep, arr, chirp, targets, channel, threads):
    """Per-frequency echoes focused into a coregistered stack."""
    f_c = scenario.carrier_hz

    def synth(step: int):
        return synthesize_echo(
            targets,
            master,
            slave,
            sweep,
            chirp.frequencies[step],
            arr.aperture_radius,
            channel=channel,
            snr_db=scenario.snr_db,
            seed=scenario.seed,
            frequency_step=step,
            carrier_hz=f_c,
        )

    echoes = _fan_out(
        [(step, (lambda s=step: synth(s))) for step in range(chirp.n_steps)], threads
    )
    refs = {
        step: reference_echo(
            master, slave, sweep, chirp.frequencies[step], arr.aperture_radius, carrier_hz=f_c
        )
        for step in range(chirp.n_steps)
    }
    filtered = [
        matched_filter(echoes[step], refs[step]) for step in range(chirp.n_steps)
    ]
    return mca_split(filtered, chirp, sweep)


def _profile_metrics(power):
    """(n_peaks, resolved, separation) of a tomographic power profile."""
    floor = 0.2 * power.max()
    peaks = [
        i
        for i in range(1, power.size - 1)
        if power[i] > power[i - 1] and power[i] >= power[i + 1] and power[i] > floor
    ]
    if len(peaks) < 2:
        return len(peaks), False, 0.0
    top = sorted(peaks, key=lambda i: -power[i])[:2]
    lo, hi = min(top), max(top)
    valley = power[lo : hi + 1].min()
    resolved = valley <= 0.5 * min(power[lo], power[hi])
    return len(peaks), bool(resolved), hi - lo


def _ladder_rows(scenario, master, slave, sweep, arr, bandwidths):
    """Two stacked targets probed across the stepped-frequency ladder."""
    probe = [
        Scatterer(np.array([0.0, 0.0, -LADDER_SEPARATION_M / 2]), ODD_BOUNCE),
        Scatterer(np.array([0.0, 0.0, +LADDER_SEPARATION_M / 2]), ODD_BOUNCE),
    ]
    f_c = scenario.carrier_hz
    k_f = scenario.chirp.k_f
    rows = []
    for bw in bandwidths:
        chirp = build_chirp_plan(f_c, bw, k_f)
        stack = _tomo_stack(scenario, master, slave, sweep, arr, chirp, probe, "HH", 1)
        center = stack.images[0].nearest_bin(0.0, 0.0)
        vec = multilook_vector(stack, center)
        z_grid = default_height_grid(chirp, oversample=16)
        profile = tomo_invert(steering_matrix(chirp.frequencies, z_grid), vec)
        power = np.abs(profile.reflectivity) ** 2
        n_peaks, resolved, sep_bins = _profile_metrics(power)
        sep_m = sep_bins * (z_grid[1] - z_grid[0])
        rows.append(
            [
                f"{bw:.0f}",
                f"{tomo_resolution(bw):.4f}",
                n_peaks,
                int(resolved),
                f"{sep_m:.4f}",
            ]
        )
    return rows


def run_tomo(scenario: Scenario, outdir, threads: int = 1, quicklook: bool = False):
    """Sub-band stacks, per-cell height profiles, polarimetric composites, ladder."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = _new_manifest(scenario, "tomo")

    with _stage(manifest, "setup"):
        chirp = scenario.build_chirp()
        arr = scenario.build_array()
        master, slave = scenario.build_platforms()
        sweep = scenario.build_sweep()
        targets, cells = scenario.build_targets()
        if not targets:
            raise ScenarioError("scene", "scene is empty")
        channels = _active_channels(targets)
        if not cells:
            seen = []
            for t in targets:
                xy = (round(float(t.position[0]), 6), round(float(t.position[1]), 6))
                if xy not in seen:
                    seen.append(xy)
            cells = {f"cell{i}": xy for i, xy in enumerate(seen)}

    with _stage(manifest, "stacks"):
        stacks = {
            ch: _tomo_stack(
                scenario, master, slave, sweep, arr, chirp, targets, ch, threads
            )
            for ch in channels
        }

    z_grid = default_height_grid(chirp)
    steering = steering_matrix(chirp.frequencies, z_grid)

    with _stage(manifest, "invert+emit"):
        any_stack = stacks[channels[0]]
        emit_full_stack = any_stack.images[0].data.shape[0] <= 512
        for ch in channels:
            if emit_full_stack:
                for step, image in enumerate(stacks[ch].images):
                    _emit_grid(
                        manifest, outdir, f"stack_{ch}_f{step:02d}.oamg", image.data, quicklook
                    )
            else:
                mid = len(stacks[ch].images) // 2
                _emit_grid(
                    manifest,
                    outdir,
                    f"stack_{ch}_mid.oamg",
                    stacks[ch].images[mid].data,
                    quicklook,
                )

        pauli_rows = []
        for cell_name in sorted(cells):
            xy = cells[cell_name]
            bins = any_stack.images[0].nearest_bin(
                *ground_to_phase(master, slave, xy, scenario.carrier_hz)
            )
            profiles = {}
            for ch in channels:
                vec = multilook_vector(stacks[ch], bins)
                profiles[ch] = tomo_invert(steering, vec, channel=ch).reflectivity
            prof_rows = [
                [f"{z_grid[i]:.4f}"]
                + [f"{profiles[ch][i].real:.6e}" for ch in channels]
                + [f"{profiles[ch][i].imag:.6e}" for ch in channels]
                for i in range(z_grid.size)
            ]
            _emit_csv(
                manifest,
                outdir,
                f"profile_{cell_name}.csv",
                ["z_m"]
                + [f"{ch}_re" for ch in channels]
                + [f"{ch}_im" for ch in channels],
                prof_rows,
            )
            if all(ch in profiles for ch in ("HH", "VV")):
                hv = profiles.get("HV", np.zeros_like(profiles["HH"]))
                vh = profiles.get("VH", hv)
                cross = (hv + vh) / 2.0  # symmetrize independent reconstructions
                powers = np.zeros(3)
                for i in range(z_grid.size):
                    s = np.array(
                        [[profiles["HH"][i], cross[i]], [cross[i], profiles["VV"][i]]]
                    )
                    p1, p2, p3 = pauli_channels(s)
                    powers += np.abs([p1, p2, p3]) ** 2
                with np.errstate(divide="ignore"):
                    db = 10.0 * np.log10(powers / powers.max())
                dominant = ("p1", "p2", "p3")[int(np.argmax(powers))]
                pauli_rows.append(
                    [cell_name, f"{db[0]:.2f}", f"{db[1]:.2f}", f"{db[2]:.2f}", dominant]
                )
        if pauli_rows:
            _emit_csv(
                manifest,
                outdir,
                "pauli_summary.csv",
                ["cell", "p1_db", "p2_db", "p3_db", "dominant"],
                pauli_rows,
            )

    with _stage(manifest, "ladder"):
        ladder = _ladder_rows(scenario, master, slave, sweep, arr, TABLE2_BANDWIDTHS_HZ)
        _emit_csv(
            manifest,
            outdir,
            "tomo_ladder.csv",
            ["bandwidth_hz", "delta_m", "n_peaks", "resolved", "separation_m"],
            ladder,
        )
        res_rows = [
            [f"{bw:.0f}", f"{tomo_resolution(bw):.4f}"] for bw in TABLE2_BANDWIDTHS_HZ
        ]
        panel_aperture = (arr.n_cols - 1) * arr.spacing
        res_rows.append(
            [
                "classical_panel",
                f"{classical_resolution(arr.wavelength, master.slant_range, panel_aperture):.1f}",
            ]
        )
        _emit_csv(
            manifest, outdir, "resolution.csv", ["bandwidth_hz", "delta_m"], res_rows
        )
    write_manifest(outdir / "manifest.json", manifest)
    return manifest


# --- sweep ---------------------------------------------------------------------


def _sweep_baseline(scenario, value):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        master, slave = platform_positions(
            value,
            altitude_m=scenario.altitude_m,
            scene_latitude_deg=scenario.scene_latitude_deg,
            ring_angle_rad=antenna.mainlobe_angle(
                scenario.build_array().wavenumber, scenario.build_array().aperture_radius
            ),
        )
    cond = float(np.linalg.cond(bearing_jacobian(master, slave, scenario.carrier_hz)))
    return {"baseline_deg": value, "condition_number": cond}


def _sweep_oam_bw(scenario, value):
    arr = scenario.build_array()
    master, slave = scenario.build_platforms()
    sweep = build_oam_sweep(scenario.oam.k_steps, value, scenario.oam.mode)
    probe = [Scatterer(np.array([*PSF_PROBE_XY, 0.0]), ODD_BOUNCE)]
    f_c = scenario.carrier_hz
    echo = synthesize_echo(
        probe, master, slave, sweep, f_c, arr.aperture_radius, carrier_hz=f_c
    )
    ref = reference_echo(master, slave, sweep, f_c, arr.aperture_radius, carrier_hz=f_c)
    slc = focus_2d(matched_filter(echo, ref), sweep)
    report = measure_peak(slc.data)
    dphi = float(slc.phi_m_axis[1] - slc.phi_m_axis[0])
    lam_c = arr.wavelength
    width_phi = (report.width_neg3db[0] + report.width_neg3db[1]) / 2.0 * dphi
    return {
        "b_oam": value,
        "width_phi_rad": width_phi,
        "width_m": width_phi * lam_c / (2.0 * np.pi),
    }


def _sweep_chirp_bw(scenario, value):
    arr = scenario.build_array()
    master, slave = scenario.build_platforms()
    sweep = scenario.build_sweep()
    row = _ladder_rows(scenario, master, slave, sweep, arr, [value])[0]
    return {
        "bandwidth_hz": value,
        "delta_m": float(row[1]),
        "n_peaks": row[2],
        "resolved": row[3],
        "separation_m": float(row[4]),
    }


SWEEP_RUNNERS = {
    "baseline": _sweep_baseline,
    "oam_bw": _sweep_oam_bw,
    "chirp_bw": _sweep_chirp_bw,
}


def run_sweep(
    scenario: Scenario,
    axis: str,
    values=None,
    outdir=".",
    threads: int = 1,
    quicklook: bool = False,
):
    """One metrics row per swept value; fan-out across workers."""
    if axis not in SWEEP_RUNNERS:
        raise ScenarioError("sweep.axis", f"unknown axis {axis!r}; pick from {sorted(SWEEP_RUNNERS)}")
    values = list(SWEEP_DEFAULTS[axis]) if values is None else [float(v) for v in values]
    if len(values) < 2:
        raise ScenarioError("sweep.values", "a sweep needs at least 2 values")
    if axis == "chirp_bw" and scenario.chirp is None:
        raise ScenarioError("chirp", "chirp_bw sweeps require a stepped-frequency plan")

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = _new_manifest(scenario, f"sweep:{axis}")
    runner = SWEEP_RUNNERS[axis]

    with _stage(manifest, "sweep"):
        results = _fan_out(
            [(i, (lambda v=v: runner(scenario, v))) for i, v in enumerate(values)],
            threads,
        )
    with _stage(manifest, "emit"):
        header = list(results[0].keys())
        rows = [[f"{results[i][h]:.6g}" if isinstance(results[i][h], float) else results[i][h] for h in header] for i in range(len(values))]
        _emit_csv(manifest, outdir, f"sweep_{axis}.csv", header, rows)
    write_manifest(outdir / "manifest.json", manifest)
    return manifest
