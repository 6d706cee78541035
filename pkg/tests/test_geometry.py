import numpy as np
import pytest

from oamradar.geometry import (
    EARTH_RADIUS_M,
    EVEN_BOUNCE,
    GEO_ALTITUDE_M,
    ODD_BOUNCE,
    VOLUME,
    DegenerateGeometryError,
    GeometryWarning,
    Scatterer,
    SceneFrame,
    case1_targets,
    case2_scene,
    grid25_targets,
    ground_slant_range,
    look_geometry,
    pauli_channels,
    platform_positions,
    vortex_geometry,
)


class TestPlatformPositions:
    def test_chord_separation(self, platforms25):
        master, slave = platforms25
        # spherical-chord arithmetic oracle
        r_orb = EARTH_RADIUS_M + GEO_ALTITUDE_M
        expected = 2.0 * r_orb * np.sin(np.radians(12.5))
        chord = np.linalg.norm(master.position - slave.position)
        assert chord == pytest.approx(expected, rel=1e-9)

    def test_zero_baseline_rejected(self):
        with pytest.raises(DegenerateGeometryError, match="baseline"):
            platform_positions(0.0)

    def test_small_baseline_flagged(self):
        with pytest.warns(GeometryWarning, match="below the optimal"):
            platform_positions(2.0)

    def test_outside_envelope_flagged(self):
        with pytest.warns(GeometryWarning, match="envelope"):
            platform_positions(1.0)
        with pytest.warns(GeometryWarning, match="envelope"):
            platform_positions(30.0)

    def test_reference_baseline_silent(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            platform_positions(25.0)

    def test_range_scale(self, platforms25):
        master, slave = platforms25
        assert 3.0e7 < master.slant_range < 5.0e7
        assert master.slant_range == pytest.approx(slave.slant_range, rel=1e-12)

    def test_boresights_meet_scene_center(self, platforms25):
        for p in platforms25:
            np.testing.assert_allclose(
                p.position + p.slant_range * p.boresight, np.zeros(3), atol=1e-6
            )

    def test_vortex_axes_distinct_ground_points(self, platforms25):
        master, slave = platforms25
        d = np.linalg.norm(master.axis_ground_point - slave.axis_ground_point)
        assert d > 1e5  # well-separated ring centers
        assert abs(master.axis_ground_point[2]) < 1e-6


class TestLookGeometry:
    def test_scene_center_on_boresight(self, platforms25):
        for p in platforms25:
            r, theta, _ = look_geometry(p, np.zeros(3))
            assert theta == pytest.approx(0.0, abs=1e-9)
            assert r == pytest.approx(p.slant_range, rel=1e-12)

    def test_baseline_offset_changes_azimuth(self, platforms25):
        # vector-geometry oracle: a target offset along the arc direction is
        # seen at different azimuths from the two ends of the baseline
        master, slave = platforms25
        target = np.array([0.0, 500.0, 0.0])
        _, _, phi_m = look_geometry(master, target)
        _, _, phi_s = look_geometry(slave, target)
        assert abs(phi_m - phi_s) > 1e-3

    def test_translation_consistency(self, platforms25):
        from dataclasses import replace

        master, _ = platforms25
        shift = np.array([123.0, -456.0, 789.0])
        target = np.array([40.0, -25.0, 3.0])
        moved = replace(
            master,
            position=master.position + shift,
            axis_ground_point=master.axis_ground_point + shift,
        )
        r0, t0, p0 = look_geometry(master, target)
        r1, t1, p1 = look_geometry(moved, target + shift)
        assert r1 == pytest.approx(r0, abs=1e-6)
        assert t1 == pytest.approx(t0, abs=1e-12)
        assert p1 == pytest.approx(p0, abs=1e-12)

    def test_mirror_symmetry(self, platforms25):
        # swapping master and slave mirrors the look across the scene meridian
        master, slave = platforms25
        target = np.array([37.0, 12.0, 0.0])
        mirror = np.array([37.0, -12.0, 0.0])
        r_m, t_m, _ = look_geometry(master, target)
        r_s, t_s, _ = look_geometry(slave, mirror)
        assert r_m == pytest.approx(r_s, rel=1e-12)
        assert t_m == pytest.approx(t_s, abs=1e-12)


class TestVortexGeometry:
    def test_scene_center_reference(self, platforms25):
        for p in platforms25:
            _, theta_v, u = vortex_geometry(p, np.zeros(3))
            assert u == pytest.approx(0.0, abs=1e-9)
            assert theta_v > 0  # the scene sits on the ring, not in the null

    def test_arc_coordinate_is_metric(self, platforms25):
        master, _ = platforms25
        _, _, u1 = vortex_geometry(master, np.array([1.0, 0.0, 0.0]))
        _, _, u2 = vortex_geometry(master, np.array([2.0, 0.0, 0.0]))
        assert u2 == pytest.approx(2.0 * u1, rel=1e-5)

    def test_ground_slant_range_ignores_height(self, platforms25):
        master, _ = platforms25
        a = ground_slant_range(master, np.array([5.0, 3.0, 0.0]))
        b = ground_slant_range(master, np.array([5.0, 3.0, 250.0]))
        assert a == b


class TestPauli:
    def test_trihedral(self):
        p1, p2, p3 = pauli_channels(ODD_BOUNCE)
        assert p1 == pytest.approx(np.sqrt(2))
        assert p2 == pytest.approx(0.0)
        assert p3 == pytest.approx(0.0)

    def test_dihedral(self):
        p1, p2, p3 = pauli_channels(EVEN_BOUNCE)
        assert p1 == pytest.approx(0.0)
        assert p2 == pytest.approx(np.sqrt(2))
        assert p3 == pytest.approx(0.0)

    def test_volume(self):
        p1, p2, p3 = pauli_channels(VOLUME)
        assert p3 == pytest.approx(np.sqrt(2))

    def test_span_conservation(self, rng):
        # direct algebra oracle on random reciprocal matrices
        for _ in range(50):
            hh, vv, hv = (rng.normal() + 1j * rng.normal() for _ in range(3))
            s = np.array([[hh, hv], [hv, vv]])
            p1, p2, p3 = pauli_channels(s)
            span = abs(p1) ** 2 + abs(p2) ** 2 + abs(p3) ** 2
            expected = abs(hh) ** 2 + abs(vv) ** 2 + 2 * abs(hv) ** 2
            assert span == pytest.approx(expected, rel=1e-12)

    def test_non_reciprocal_rejected(self):
        s = np.array([[1.0, 0.3], [0.1, 1.0]], dtype=complex)
        with pytest.raises(ValueError, match="reciprocal"):
            pauli_channels(s)
        with pytest.raises(ValueError, match="reciprocal"):
            Scatterer(np.zeros(3), s)


class TestSceneContent:
    def test_grid25(self):
        targets = grid25_targets(1.0)
        assert len(targets) == 25
        xs = sorted({t.position[0] for t in targets})
        assert xs == [-2.0, -1.0, 0.0, 1.0, 2.0]

    def test_case1_heights(self):
        targets = case1_targets()
        assert len(targets) == 3
        assert all(t.position[0] == 0.0 and t.position[1] == 0.0 for t in targets)

    def test_case2_deterministic(self):
        t1, cells1 = case2_scene(seed=5)
        t2, cells2 = case2_scene(seed=5)
        assert cells1 == cells2
        for a, b in zip(t1, t2):
            np.testing.assert_allclose(a.position, b.position)
            np.testing.assert_allclose(a.scattering_matrix, b.scattering_matrix)
        t3, _ = case2_scene(seed=6)
        assert any(
            not np.allclose(a.position, b.position) for a, b in zip(t1, t3)
        )

    def test_case2_cells_polarimetry(self):
        targets, cells = case2_scene(seed=0)
        assert set(cells) == {"ground", "foliage", "building"}
        # foliage scatterers are cross-pol, building even-bounce
        fol = [t for t in targets if tuple(t.position[:2]) == cells["foliage"]]
        assert all(abs(t.scattering_matrix[0, 1]) > 0 for t in fol)

    def test_scene_frame(self):
        frame = SceneFrame(extent_x=4.0, extent_y=4.0, spacing=0.5)
        x, y = frame.axes()
        assert x.size == 9 and y.size == 9
        assert x[0] == -2.0 and x[-1] == 2.0
        with pytest.raises(ValueError):
            SceneFrame(extent_x=-1.0)
