import numpy as np
import pytest

from oamradar.antenna import make_pva, symmetric_vortex_phases
from oamradar.geometry import platform_positions
from oamradar.waveform import build_oam_sweep

CARRIER_HZ = 9.6e9


@pytest.fixture(scope="session")
def array16():
    """Default 16x16 half-wavelength panel at 9.6 GHz with a mode-1 vortex."""
    arr = make_pva()
    return arr.with_phases(symmetric_vortex_phases(arr))


@pytest.fixture(scope="session")
def platforms25(array16):
    """Master/slave pair at the 25 degree reference baseline."""
    return platform_positions(25.0)


@pytest.fixture(scope="session")
def sweep32():
    return build_oam_sweep(32, 0.5)


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.Philox(20260809))
