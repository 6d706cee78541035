"""Vortex-beam interferometric radar imaging and height tomography simulator.

The package is organized as a numpy/scipy library:

``numerics``
    Shared kernel: Bessel evaluation, unitary 2D DFT, peak/PSF metrology.
``antenna``
    Planar vortex antenna, phase-allocation strategies, far fields, gain.
``geometry``
    Two-satellite geostationary geometry, scatterers, scene presets.
``waveform``
    Vortex-depth sweeps, stepped-frequency plans, ping-pong epoch schedule,
    interferometric transmission matrix.
``imaging``
    Raw echo synthesis, matched filter, 2D FFT focusing, ground remap.
``tomography``
    Sub-band stacks, frequency steering matrix, height-profile inversion.
``scenario`` / ``pipeline`` / ``cli``
    Batch front end: YAML scenarios, pattern/image/tomo/sweep runs.
"""

from .numerics import PeakReport, bessel_j, dft2, measure_peak
from .antenna import (
    PvaArray,
    asymmetric_vortex_phases,
    far_field_bessel,
    far_field_exact,
    gain_pattern,
    make_pva,
    radiation_intensity,
    symmetric_vortex_phases,
)
from .geometry import (
    GeoPlatform,
    Scatterer,
    SceneFrame,
    look_geometry,
    pauli_channels,
    platform_positions,
    vortex_geometry,
)
from .waveform import (
    ChirpPlan,
    EpochSchedule,
    OamSweep,
    build_chirp_plan,
    build_epoch_schedule,
    build_oam_sweep,
    transmission_matrix,
)
from .imaging import (
    EchoMatrix,
    GroundImage,
    SlcImage,
    focus_2d,
    ground_remap,
    matched_filter,
    reference_echo,
    resolution_range_azimuth,
    synthesize_echo,
)
from .tomography import (
    McaStack,
    SteeringMatrix,
    TomoProfile,
    classical_resolution,
    mca_split,
    multilook_vector,
    steering_matrix,
    tomo_invert,
    tomo_resolution,
)

__version__ = "0.1.0"
