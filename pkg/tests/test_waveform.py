import numpy as np
import pytest

from oamradar.waveform import (
    build_chirp_plan,
    build_epoch_schedule,
    build_oam_sweep,
    transmission_matrix,
)


class TestOamSweep:
    def test_full_sweep_endpoints(self):
        sweep = build_oam_sweep(2, 0.5)
        np.testing.assert_allclose(sweep.depths, [2.0 / 3.0, 1.0])
        np.testing.assert_allclose(sweep.pitches, [1.5, 1.0])

    def test_uniform_steps(self):
        sweep = build_oam_sweep(37, 0.4)
        steps = np.diff(sweep.depths)
        assert np.max(np.abs(steps - steps[0])) < 1e-15

    def test_span_scales_linearly(self):
        half = build_oam_sweep(8, 0.25)
        full = build_oam_sweep(8, 0.5)
        assert half.span == pytest.approx(full.span / 2.0, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="k_steps"):
            build_oam_sweep(1, 0.5)
        with pytest.raises(ValueError, match="b_oam"):
            build_oam_sweep(4, 0.0)
        with pytest.raises(ValueError, match="b_oam"):
            build_oam_sweep(4, 0.6)
        with pytest.raises(ValueError, match="mode"):
            build_oam_sweep(4, 0.5, mode=3)


class TestChirpPlan:
    def test_reference_comb(self):
        plan = build_chirp_plan(9.6e9, 500e6, 25)
        assert plan.frequencies[0] == pytest.approx(9.35e9)
        assert plan.frequencies[-1] == pytest.approx(9.85e9)
        assert plan.n_steps == 25

    def test_two_steps_are_endpoints(self):
        plan = build_chirp_plan(9.6e9, 500e6, 2)
        np.testing.assert_allclose(plan.frequencies, [9.35e9, 9.85e9])

    def test_step_arithmetic(self):
        plan = build_chirp_plan(9.6e9, 500e6, 25)
        assert plan.step_hz == pytest.approx(500e6 / 24.0)

    def test_comb_uniformity(self):
        plan = build_chirp_plan(9.6e9, 500e6, 25)
        df = np.diff(plan.offsets_hz)
        assert np.max(np.abs(df - plan.step_hz)) < 1e-6

    def test_validation(self):
        with pytest.raises(ValueError, match="n_steps"):
            build_chirp_plan(9.6e9, 500e6, 1)
        with pytest.raises(ValueError, match="span"):
            build_chirp_plan(9.6e9, 0.0, 4)
        with pytest.raises(ValueError, match="carrier"):
            build_chirp_plan(100e6, 500e6, 4)


class TestEpochSchedule:
    def test_alternation_and_count(self):
        sched = build_epoch_schedule(3, 1e-4)
        assert [e.transmitter for e in sched.epochs] == ["M", "S", "M", "S"]

    @pytest.mark.parametrize("k", [2, 5, 16])
    def test_epoch_count(self, k):
        sched = build_epoch_schedule(k, 1e-4)
        assert len(sched.epochs) == 2 * (k - 1)
        txs = [e.transmitter for e in sched.epochs]
        assert txs == ["M", "S"] * (k - 1)

    def test_round_trip_bookkeeping(self):
        sched = build_epoch_schedule(4, 1e-4, range_m=3.6e7)
        assert sched.round_trip_s == pytest.approx(0.2402, abs=1e-3)

    def test_frame_duration_order_of_magnitude(self):
        # 25-step frame at 0.1 ms samples lands on the ~10 s scale
        sched = build_epoch_schedule(25, 1e-4, range_m=3.6e7)
        assert 3.0 < sched.frame_duration_s < 33.0

    def test_zero_sample_rejected(self):
        with pytest.raises(ValueError, match="sample"):
            build_epoch_schedule(4, 0.0)


class TestTransmissionMatrix:
    def test_diagonal_zero_phase(self):
        sweep = build_oam_sweep(6, 0.5)
        mat = transmission_matrix(sweep)
        np.testing.assert_allclose(np.diag(mat), np.ones(6))

    def test_hermitian_phase(self):
        sweep = build_oam_sweep(5, 0.3)
        mat = transmission_matrix(sweep)
        np.testing.assert_allclose(mat, mat.conj().T, atol=1e-14)
        np.testing.assert_allclose(np.abs(mat), 1.0)

    def test_two_step_phase(self):
        sweep = build_oam_sweep(2, 0.5)
        mat = transmission_matrix(sweep)
        # depth pair (2/3, 1): two-way phase difference = 2 * 2*pi * (1/3)
        expected = np.exp(-1j * 4.0 * np.pi / 3.0)
        assert mat[0, 1] == pytest.approx(expected, rel=1e-12)
        assert mat[1, 0] == pytest.approx(np.conj(expected), rel=1e-12)

    def test_rank_one(self):
        sweep = build_oam_sweep(9, 0.5)
        mat = transmission_matrix(sweep)
        s = np.linalg.svd(mat, compute_uv=False)
        assert s[0] == pytest.approx(9.0, rel=1e-12)
        assert np.all(s[1:] < 1e-10)

    def test_one_way_diagnostic(self):
        sweep = build_oam_sweep(2, 0.5)
        mat = transmission_matrix(sweep, two_way=False)
        assert mat[0, 1] == pytest.approx(np.exp(-1j * 2.0 * np.pi / 3.0), rel=1e-12)
