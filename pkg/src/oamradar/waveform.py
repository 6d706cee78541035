"""Vortex-depth sweeps, stepped-frequency plans, epoch schedule, transmission matrix.

The stepped vortex modulation scales the full phase revolution by a depth
factor swept over K uniform steps; the swept span is what acts as the
range-azimuth bandwidth. The helical pitch of step i is ``wavelength / depth_i``,
running from 3/2 wavelength down to one wavelength at the full sweep.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

__all__ = [
    "ChirpPlan",
    "Epoch",
    "EpochSchedule",
    "OamSweep",
    "build_chirp_plan",
    "build_epoch_schedule",
    "build_oam_sweep",
    "transmission_matrix",
    "write_schedule_csv",
]

FULL_SWEEP_FRACTION = 0.5  # fractional bandwidth of the full 3/2..1 pitch sweep


@dataclass(frozen=True)
class OamSweep:
    """Stepped vortex-depth plan.

    ``depths`` is strictly increasing with the last step at full depth 1;
    ``pitches`` holds the helical pitch of each step in wavelength units
    (``1 / depth``). ``b_oam`` is the fractional bandwidth knob in (0, 0.5].
    """

    depths: np.ndarray = field(repr=False)
    pitches: np.ndarray = field(repr=False)
    b_oam: float = FULL_SWEEP_FRACTION
    mode: int = 1

    def __post_init__(self):
        d = np.asarray(self.depths, dtype=float)
        if d.size < 2:
            raise ValueError("sweep needs at least 2 steps")
        if not np.all(np.diff(d) > 0):
            raise ValueError("depths must be strictly increasing")
        p = np.asarray(self.pitches, dtype=float)
        if p.shape != d.shape or np.any(p <= 0):
            raise ValueError("pitches must be positive and match depths")
        object.__setattr__(self, "depths", d)
        object.__setattr__(self, "pitches", p)

    @property
    def k_steps(self) -> int:
        return self.depths.size

    @property
    def depth_step(self) -> float:
        return float(self.depths[1] - self.depths[0])

    @property
    def span(self) -> float:
        return float(self.depths[-1] - self.depths[0])


def build_oam_sweep(k_steps: int, b_oam: float = FULL_SWEEP_FRACTION, mode: int = 1) -> OamSweep:
    """Uniform depth sweep ending at full depth.

    The swept span is ``(2/3) * b_oam`` so the full-bandwidth sweep
    (``b_oam = 0.5``) runs the depth from 2/3 to 1, i.e. the pitch from 3/2
    wavelength down to one wavelength; halving ``b_oam`` halves the span.
    """
    if k_steps < 2:
        raise ValueError("k_steps must be at least 2")
    if not 0.0 < b_oam <= FULL_SWEEP_FRACTION:
        raise ValueError(f"b_oam must be in (0, {FULL_SWEEP_FRACTION}], got {b_oam}")
    if mode != 1:
        raise ValueError("only the single vortex mode (mode=1) is modeled")
    span = (2.0 / 3.0) * b_oam
    depths = np.linspace(1.0 - span, 1.0, k_steps)
    return OamSweep(depths=depths, pitches=1.0 / depths, b_oam=float(b_oam), mode=mode)


@dataclass(frozen=True)
class ChirpPlan:
    """Uniform stepped-frequency comb centered on the carrier.

    The comb is stored as offsets about the carrier so its uniformity is
    held to well below a microhertz, which absolute GHz-scale floats cannot
    represent; absolute frequencies are derived on demand.
    """

    carrier_hz: float
    offsets_hz: np.ndarray = field(repr=False)
    span_hz: float = 0.0

    def __post_init__(self):
        off = np.asarray(self.offsets_hz, dtype=float)
        if off.size < 2:
            raise ValueError("chirp plan needs at least 2 frequency steps")
        df = np.diff(off)
        if not np.all(df > 0) or np.max(np.abs(df - df[0])) > 1e-6:
            raise ValueError("offsets must form a uniform increasing comb")
        if self.carrier_hz + off[0] <= 0:
            raise ValueError("comb extends to non-positive frequencies")
        object.__setattr__(self, "offsets_hz", off)

    @property
    def frequencies(self) -> np.ndarray:
        return self.carrier_hz + self.offsets_hz

    @property
    def n_steps(self) -> int:
        return self.offsets_hz.size

    @property
    def step_hz(self) -> float:
        return float(self.offsets_hz[1] - self.offsets_hz[0])


def build_chirp_plan(carrier_hz: float, span_hz: float, n_steps: int) -> ChirpPlan:
    """Frequency comb from carrier - span/2 to carrier + span/2."""
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    if span_hz <= 0:
        raise ValueError("span_hz must be positive")
    if carrier_hz <= span_hz / 2.0:
        raise ValueError("carrier must exceed half the span")
    offsets = np.linspace(-span_hz / 2.0, span_hz / 2.0, n_steps)
    return ChirpPlan(carrier_hz=float(carrier_hz), offsets_hz=offsets, span_hz=float(span_hz))


@dataclass(frozen=True)
class Epoch:
    index: int
    transmitter: str  # "M" | "S"
    oam_step: int
    frequency_step: int
    sample_s: float
    t_start_s: float


@dataclass(frozen=True)
class EpochSchedule:
    """Alternating master/slave transmission frame of 2(K-1) epochs."""

    epochs: tuple
    sample_s: float
    round_trip_s: float

    @property
    def frame_duration_s(self) -> float:
        last = self.epochs[-1]
        return last.t_start_s + self._epoch_duration()

    def _epoch_duration(self) -> float:
        # K samples of vortex stepping plus the two-way light time
        k = len(self.epochs) // 2 + 1
        return k * self.sample_s + self.round_trip_s


def build_epoch_schedule(
    k_steps: int,
    sample_s: float,
    frequency_step: int = 0,
    range_m: float = 3.6e7,
) -> EpochSchedule:
    """Ping-pong schedule: even epochs transmit from M, odd from S.

    Each epoch holds one vortex step of the dwelling transmitter while the
    other sweeps; the two-way light time ``2 * range_m / c`` is bookkept in
    every epoch (about 0.24 s at geostationary range).
    """
    if k_steps < 2:
        raise ValueError("k_steps must be at least 2")
    if sample_s <= 0:
        raise ValueError("sample duration must be positive")
    round_trip = 2.0 * range_m / SPEED_OF_LIGHT
    duration = k_steps * sample_s + round_trip
    epochs = []
    for e in range(2 * (k_steps - 1)):
        epochs.append(
            Epoch(
                index=e,
                transmitter="M" if e % 2 == 0 else "S",
                oam_step=e // 2,
                frequency_step=frequency_step,
                sample_s=sample_s,
                t_start_s=e * duration,
            )
        )
    return EpochSchedule(epochs=tuple(epochs), sample_s=sample_s, round_trip_s=round_trip)


def transmission_matrix(sweep: OamSweep, two_way: bool = True) -> np.ndarray:
    """K x K interferometric transmission matrix of the depth sweep.

    Entry (i, j) is ``exp(1j * g * (phase_i - phase_j))`` with
    ``phase_i = 2*pi*depth_i`` and ``g = 2`` for the two-way convention
    (``g = 1`` with ``two_way=False``, for diagnostics). Unit amplitudes;
    diagonal entries carry zero phase, and the matrix is a rank-1 phase
    outer product.
    """
    phases = 2.0 * np.pi * sweep.depths
    g = 2.0 if two_way else 1.0
    col = np.exp(1j * g * phases)
    return np.outer(col, col.conj())


def write_schedule_csv(path, schedule: EpochSchedule, sweep: OamSweep, chirp: ChirpPlan | None = None):
    """Dump the epoch schedule: epoch, tx, oam_step, xi, freq_hz, t_start_s."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "tx", "oam_step", "xi", "freq_hz", "t_start_s"])
        for ep in schedule.epochs:
            freq = chirp.frequencies[ep.frequency_step] if chirp is not None else ""
            writer.writerow(
                [
                    ep.index,
                    ep.transmitter,
                    ep.oam_step,
                    f"{sweep.depths[ep.oam_step]:.9g}",
                    freq,
                    f"{ep.t_start_s:.9g}",
                ]
            )
