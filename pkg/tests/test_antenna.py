import numpy as np
import pytest

from oamradar.antenna import (
    asymmetric_vortex_phases,
    directivity_pattern,
    element_offsets,
    far_field_bessel,
    far_field_exact,
    gain_pattern,
    mainlobe_angle,
    make_pva,
    radiation_intensity,
    ring_model_mismatch,
    rms_element_radius,
    symmetric_vortex_phases,
    wrap_phase,
)
from oamradar.numerics import J1_PEAK_ARG, DegenerateGridError, bessel_j


def wrap_diff(a, b):
    return np.angle(np.exp(1j * (a - b)))


class TestPhaseAllocation:
    def test_diametric_elements_differ_by_pi(self, array16):
        phases = symmetric_vortex_phases(array16)
        # opposite corners sit diametrically across the center
        assert abs(wrap_diff(phases[0, 0], phases[-1, -1])) == pytest.approx(np.pi, abs=1e-12)
        assert abs(wrap_diff(phases[3, 5], phases[12, 10])) == pytest.approx(np.pi, abs=1e-12)

    def test_full_turn_cancellation(self, array16):
        phases = symmetric_vortex_phases(array16)
        yg, zg = element_offsets(16, 16, array16.spacing)
        radius = np.hypot(yg, zg)
        ring = np.isclose(radius, radius[0, 7], atol=1e-9)  # centered ring of 4 elements
        assert ring.sum() >= 4
        assert abs(np.exp(1j * phases[ring]).sum()) < 1e-10

    def test_half_depth_winding(self, array16):
        # direct evaluation: total wrapped increment around the center at
        # depth 0.5 is pi per half turn (2*pi*0.5 per full turn)
        phases = symmetric_vortex_phases(array16, depth=0.5)
        yg, zg = element_offsets(16, 16, array16.spacing)
        angles = np.arctan2(yg, zg)
        radius = np.hypot(yg, zg)
        ring = np.isclose(radius, radius[0, 7], atol=1e-9)
        order = np.argsort(angles[ring])
        ring_phases = phases[ring][order]
        total = sum(
            wrap_diff(ring_phases[(i + 1) % len(ring_phases)], ring_phases[i])
            for i in range(len(ring_phases) - 1)
        )
        expected = 0.5 * (angles[ring][order][-1] - angles[ring][order][0])
        assert total == pytest.approx(expected, abs=1e-10)

    def test_depth_domain(self, array16):
        with pytest.raises(ValueError, match="depth"):
            symmetric_vortex_phases(array16, depth=0.0)
        with pytest.raises(ValueError, match="depth"):
            symmetric_vortex_phases(array16, depth=1.1)

    def test_mode_domain(self, array16):
        with pytest.raises(ValueError, match="mode"):
            symmetric_vortex_phases(array16, mode=2)

    def test_zero_shift_matches_symmetric(self, array16):
        sym = symmetric_vortex_phases(array16)
        asym = asymmetric_vortex_phases(array16, shift=(0.0, 0.0))
        np.testing.assert_allclose(asym, sym)

    def test_shifted_singularity_location(self, array16):
        # numeric singularity search: the near-axis null of the far field
        # moves to the shifted winding center
        shift = (2.0 * array16.spacing, 0.0)
        arr = array16.with_phases(asymmetric_vortex_phases(array16, shift=shift))
        sym = array16
        theta = np.radians(np.linspace(0.0, 4.0, 161))
        phi = np.radians(np.arange(0.0, 360.0, 3.0))
        f_sym = np.abs(far_field_exact(sym, theta[:, None], phi[None, :]))
        f_asym = np.abs(far_field_exact(arr, theta[:, None], phi[None, :]))
        # symmetric: deepest null at boresight; asymmetric: boresight fills in
        assert f_sym.min() == pytest.approx(f_sym[0].min(), abs=1e-12)
        assert f_asym[0].min() > 100 * f_sym[0].min()

    def test_shift_outside_panel_rejected(self, array16):
        with pytest.raises(ValueError, match="outside the panel"):
            asymmetric_vortex_phases(array16, shift=(10.0 * array16.spacing, 0.0))

    def test_wrap_range(self, array16):
        phases = symmetric_vortex_phases(array16)
        assert np.all(phases >= -np.pi) and np.all(phases < np.pi)


class TestFarField:
    def test_uniform_phase_boresight_max(self):
        arr = make_pva()
        val = far_field_exact(arr, 0.0, 0.0)
        # coherent sum: |E| = reflector factor at boresight
        expected = 2.0 * np.sin(arr.wavenumber * arr.element_height)
        assert abs(val) == pytest.approx(expected, rel=1e-12)
        grid = np.abs(far_field_exact(arr, np.radians(np.arange(0, 90, 1.0))[:, None],
                                      np.radians(np.arange(0, 360, 5.0))[None, :]))
        assert grid.max() <= abs(val) + 1e-12

    def test_vortex_boresight_null(self, array16):
        coherent_max = 2.0 * np.sin(array16.wavenumber * array16.element_height)
        assert abs(far_field_exact(array16, 0.0, 0.0)) < 1e-10 * coherent_max

    def test_matches_ring_model_in_paraxial_cone(self, array16):
        err, _ = ring_model_mismatch(array16, theta_max_deg=10.0)
        assert err < 0.05

    def test_bessel_theta0_null(self):
        assert far_field_bessel(1, 0.1, 200.0, 0.0, 0.3, 256) == 0.0

    def test_bessel_azimuth_winding(self):
        a, k = 0.1, 200.0
        v1 = far_field_bessel(1, a, k, 0.05, 0.4, 256)
        v2 = far_field_bessel(1, a, k, 0.05, 0.4 + np.pi, 256)
        assert v2 == pytest.approx(-v1, rel=1e-12)

    def test_bessel_magnitude_peak_at_ring(self):
        a, k = 0.102, 201.0
        theta = np.linspace(0.0, np.pi / 4, 20001)
        mag = np.abs(far_field_bessel(1, a, k, theta, 0.0, 256))
        peak_theta = theta[np.argmax(mag)]
        assert np.sin(peak_theta) == pytest.approx(J1_PEAK_ARG / (k * a), rel=1e-3)
        assert peak_theta == pytest.approx(mainlobe_angle(k, a), rel=1e-3)

    def test_phase_winding_slope(self):
        # unwrapped phase decreases linearly with azimuth, slope -mode
        a, k = 0.102, 201.0
        theta = mainlobe_angle(k, a)
        phi = np.linspace(0.0, 2 * np.pi, 400, endpoint=False)
        vals = far_field_bessel(1, a, k, theta, phi, 256)
        unwrapped = np.unwrap(np.angle(vals))
        slope = np.polyfit(phi, unwrapped, 1)[0]
        assert slope == pytest.approx(-1.0, abs=1e-9)
        resid = unwrapped - (unwrapped[0] + slope * phi)
        assert np.max(np.abs(resid)) < 1e-9

    def test_grating_warning(self):
        arr = make_pva(spacing=0.04)  # > one wavelength at 9.6 GHz
        with pytest.warns(UserWarning, match="grating"):
            far_field_exact(arr, 0.1, 0.0)


class TestRadiationIntensity:
    def test_zero_at_boresight(self):
        assert radiation_intensity(1, 0.1, 200.0, 0.0, 256) == 0.0

    def test_monotone_rise_to_ring(self):
        a, k = 0.102, 201.0
        theta = np.linspace(0.0, mainlobe_angle(k, a), 500)
        u = radiation_intensity(1, a, k, theta, 256)
        assert np.all(np.diff(u) > 0)

    def test_equals_squared_field(self):
        a, k = 0.102, 201.0
        theta = np.linspace(0.0, 0.5, 50)
        u = radiation_intensity(1, a, k, theta, 256)
        e = np.abs(far_field_bessel(1, a, k, theta, 0.7, 256)) ** 2
        np.testing.assert_allclose(u, e, rtol=1e-12)


class TestGain:
    def test_isotropic_is_0_dbi(self):
        theta = np.radians(np.linspace(0.0, 180.0, 181))
        phi = np.radians(np.arange(0.0, 360.0, 2.0))
        field = np.ones((theta.size, phi.size), dtype=complex)
        gain_dbi, peak = directivity_pattern(field, theta, phi)
        assert peak == pytest.approx(0.0, abs=1e-3)

    def test_vortex_ring_with_boresight_null(self, array16):
        theta, phi, gain_dbi, peak = gain_pattern(array16, theta_step_deg=1.0)
        assert gain_dbi[0].max() < peak - 100.0  # null on the axis
        ring_row = int(np.argmax(gain_dbi.max(axis=1)))
        assert 0 < ring_row < theta.size - 1
        ring_theta = np.degrees(theta[ring_row])
        assert 3.0 < ring_theta < 8.0
        # the ring is present at every azimuth within a few dB
        ring_cut = gain_dbi[ring_row]
        assert ring_cut.min() > peak - 3.0

    def test_asymmetric_beats_symmetric(self, array16):
        asym = array16.with_phases(
            asymmetric_vortex_phases(array16, shift=(2.0 * array16.spacing, 0.0))
        )
        _, _, _, peak_sym = gain_pattern(array16, theta_step_deg=1.0)
        _, _, _, peak_asym = gain_pattern(asym, theta_step_deg=1.0)
        assert peak_asym > peak_sym

    def test_scale_invariance(self, array16):
        theta = np.radians(np.linspace(0.0, 90.0, 91))
        phi = np.radians(np.arange(0.0, 360.0, 2.0))
        field = far_field_exact(array16, theta[:, None], phi[None, :])
        g1, p1 = directivity_pattern(field, theta, phi)
        g2, p2 = directivity_pattern(2.0 * field, theta, phi)  # e.g. doubled elements
        np.testing.assert_allclose(g1, g2, atol=1e-10)
        assert p1 == pytest.approx(p2, abs=1e-12)

    def test_global_phase_invariance(self, array16):
        rolled = array16.with_phases(array16.phase_offsets + 0.7)
        _, _, g1, p1 = gain_pattern(array16, theta_step_deg=2.0)
        _, _, g2, p2 = gain_pattern(rolled, theta_step_deg=2.0)
        # compare in linear power; deep machine-zero nulls are meaningless in dB
        lin1, lin2 = 10.0 ** (g1 / 10.0), 10.0 ** (g2 / 10.0)
        np.testing.assert_allclose(lin1, lin2, atol=1e-9 * lin1.max())
        assert p1 == pytest.approx(p2, abs=1e-9)

    def test_all_zero_field_degenerate(self):
        theta = np.radians(np.linspace(0.0, 90.0, 10))
        phi = np.radians(np.arange(0.0, 360.0, 45.0))
        with pytest.raises(DegenerateGridError):
            directivity_pattern(np.zeros((10, 8)), theta, phi)


class TestConstruction:
    def test_default_aperture_is_rms_radius(self):
        arr = make_pva()
        assert arr.aperture_radius == pytest.approx(
            rms_element_radius(16, 16, arr.spacing)
        )
        # 16x16 at half wavelength: rms radius = sqrt(42.5)/2 wavelengths
        assert arr.aperture_radius / arr.wavelength == pytest.approx(np.sqrt(42.5) / 2)

    def test_validation(self):
        with pytest.raises(ValueError, match="rows"):
            make_pva(n_rows=1)
        with pytest.raises(ValueError, match="spacing"):
            make_pva(spacing=-0.01)

    def test_wrap_phase(self):
        assert wrap_phase(np.pi) == pytest.approx(-np.pi)
        assert wrap_phase(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
