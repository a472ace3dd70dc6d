"""Tests for deviation-oscillator integration and phase statistics."""

import math

import numpy as np
import pytest

from gravbell import background as bg
from gravbell import deviation as dv
from gravbell.errors import (
    NumericalError,
    ParameterError,
    StepSizeError,
    UndefinedCorrelationError,
)

REST = dv.DeviationState(tau=0.0, ell=(1.0, 0.0, 0.0), ell_dot=(0.0, 0.0, 0.0))


def constant(r):
    return lambda tau: r


class TestModeFrequency:
    def test_flat(self):
        assert dv.mode_frequency(0.0, 1.0) == ("flat", 0.0)

    def test_oscillatory(self):
        kind, omega = dv.mode_frequency(4.0, 1.0)
        assert kind == "oscillatory"
        np.testing.assert_allclose(omega, 2.0, rtol=1e-15)

    def test_unstable(self):
        kind, omega = dv.mode_frequency(-1.0, 1.0)
        assert kind == "unstable"
        np.testing.assert_allclose(omega, 1.0, rtol=1e-15)

    def test_c_scales_frequency(self):
        _, omega = dv.mode_frequency(1.0, 3.0)
        np.testing.assert_allclose(omega, 3.0, rtol=1e-15)

    def test_bad_inputs(self):
        with pytest.raises(ParameterError):
            dv.mode_frequency(float("nan"), 1.0)
        with pytest.raises(ParameterError):
            dv.mode_frequency(1.0, 0.0)


class TestIntegrateDeviation:
    def test_flat_space_constant(self):
        traj = dv.integrate_deviation(REST, constant(0.0), tau_end=5.0, dt=0.05)
        assert np.all(traj.ell == np.array([1.0, 0.0, 0.0]))
        assert np.all(traj.ell_dot == 0.0)
        assert not traj.unstable

    def test_matches_closed_form_one_period(self):
        traj = dv.integrate_deviation(
            REST, constant(1.0), tau_end=2.0 * math.pi, dt=2.0 * math.pi / 1000
        )
        assert abs(traj.final.ell[0] - 1.0) <= 1e-6

    def test_matches_closed_form_everywhere(self):
        omega = 2.0
        traj = dv.integrate_deviation(
            REST, constant(omega**2), tau_end=10.0, dt=0.01
        )
        assert len(traj) == 1001
        ref = dv.closed_form_deviation(1.0, omega, traj.taus)
        assert np.max(np.abs(traj.ell[:, 0] - ref)) <= 1e-6

    def test_energy_conserved(self):
        traj = dv.integrate_deviation(
            REST, constant(1.0), tau_end=20.0 * math.pi, dt=2.0 * math.pi / 400
        )
        energy = 0.5 * np.sum(traj.ell_dot**2, axis=1) + 0.5 * np.sum(
            traj.ell**2, axis=1
        )
        assert np.max(np.abs(energy - energy[0])) / energy[0] <= 1e-8

    def test_fourth_order_convergence(self):
        errors = []
        for dt in (2.0 * math.pi / 400, 2.0 * math.pi / 800):
            traj = dv.integrate_deviation(
                REST, constant(1.0), tau_end=20.0 * math.pi, dt=dt
            )
            ref = dv.closed_form_deviation(1.0, 1.0, traj.taus)
            errors.append(np.max(np.abs(traj.ell[:, 0] - ref)))
        ratio = errors[0] / errors[1]
        assert 12.0 <= ratio <= 20.0

    def test_zero_crossing_spacing(self):
        traj = dv.integrate_deviation(
            REST, constant(1.0), tau_end=20.0 * math.pi, dt=0.01
        )
        y = traj.ell[:, 0]
        idx = np.where(np.diff(np.sign(y)) != 0)[0]
        crossings = []
        for i in idx:
            t1, t2 = traj.taus[i], traj.taus[i + 1]
            y1, y2 = y[i], y[i + 1]
            crossings.append(t1 - y1 * (t2 - t1) / (y2 - y1))
        spacing = np.diff(crossings)
        assert np.max(np.abs(spacing - math.pi)) / math.pi <= 1e-4

    def test_unstable_branch_cosh(self):
        traj = dv.integrate_deviation(REST, constant(-1.0), tau_end=2.0, dt=0.002)
        assert traj.unstable
        np.testing.assert_allclose(
            traj.ell[:, 0], np.cosh(traj.taus), rtol=1e-8
        )

    def test_step_guard_names_omega(self):
        with pytest.raises(StepSizeError) as excinfo:
            dv.integrate_deviation(REST, constant(100.0), tau_end=10.0, dt=0.1)
        assert "omega" in str(excinfo.value)
        assert "10" in str(excinfo.value)

    def test_step_guard_sees_half_nodes(self):
        # curvature that spikes only between step nodes must still trip
        def spiky(tau):
            return 400.0 if abs(tau % 0.1 - 0.05) < 0.01 else 0.0

        with pytest.raises(StepSizeError):
            dv.integrate_deviation(REST, spiky, tau_end=1.0, dt=0.1)

    def test_step_count_rounding(self):
        traj = dv.integrate_deviation(REST, constant(0.0), tau_end=1.0, dt=0.3)
        assert len(traj) == 4
        np.testing.assert_allclose(traj.taus[-1], 0.9, rtol=1e-15)

    def test_nonzero_start_time(self):
        start = dv.DeviationState(tau=2.0, ell=(1.0, 0.0, 0.0), ell_dot=(0.0, 0.0, 0.0))
        traj = dv.integrate_deviation(start, constant(0.0), tau_end=3.0, dt=0.1)
        np.testing.assert_allclose(traj.taus[0], 2.0, rtol=1e-15)
        np.testing.assert_allclose(traj.taus[-1], 3.0, rtol=1e-15)

    def test_all_components_integrated(self):
        start = dv.DeviationState(
            tau=0.0, ell=(1.0, -2.0, 0.5), ell_dot=(0.0, 0.0, 0.0)
        )
        traj = dv.integrate_deviation(start, constant(1.0), tau_end=1.0, dt=0.001)
        ref = np.cos(traj.taus)
        for j, scale in enumerate((1.0, -2.0, 0.5)):
            np.testing.assert_allclose(traj.ell[:, j], scale * ref, atol=1e-9)

    def test_driven_by_single_mode_peaks_at_mode_frequency(self):
        mode = bg.GwMode((0.0, 0.0, 1.0), 1.0, 1e-3, 0.0, 0.0)
        ens = bg.BackgroundEnsemble((mode,), 0.0, 0, 1e-2)
        total = 16.0 * 2.0 * math.pi
        n = 4096

        traj = dv.integrate_deviation(
            REST,
            lambda tau: bg.riemann_r1010(ens, (tau, 0.0, 0.0, 0.0)),
            tau_end=total,
            dt=total / n,
        )
        signal = traj.ell[:-1, 0] - np.mean(traj.ell[:-1, 0])
        spectrum = np.abs(np.fft.rfft(signal))
        peak = int(np.argmax(spectrum[2:]) + 2)
        # driving frequency 1.0 lands in bin total/(2 pi) = 16
        assert abs(peak - 16) <= 1

    def test_mode_ref_carried(self):
        traj = dv.integrate_deviation(
            REST, constant(0.0), tau_end=1.0, dt=0.1, mode_ref=5
        )
        assert traj.mode_ref == 5

    def test_non_finite_curvature_raises(self):
        with pytest.raises(NumericalError):
            dv.integrate_deviation(
                REST, constant(float("nan")), tau_end=1.0, dt=0.1
            )

    def test_bad_parameters(self):
        with pytest.raises(ParameterError):
            dv.integrate_deviation(REST, constant(0.0), tau_end=-1.0, dt=0.1)
        with pytest.raises(ParameterError):
            dv.integrate_deviation(REST, constant(0.0), tau_end=1.0, dt=0.0)
        with pytest.raises(ParameterError):
            dv.integrate_deviation(REST, constant(0.0), tau_end=0.01, dt=0.1)


class TestClosedForm:
    def test_at_zero(self):
        assert dv.closed_form_deviation(1.5, 2.0, 0.0) == 1.5

    def test_half_period(self):
        np.testing.assert_allclose(
            dv.closed_form_deviation(1.0, 1.0, math.pi), -1.0, rtol=1e-15
        )

    def test_array_argument(self):
        t = np.linspace(0.0, 1.0, 11)
        out = dv.closed_form_deviation(2.0, 3.0, t)
        np.testing.assert_allclose(out, 2.0 * np.cos(3.0 * t), rtol=1e-15)

    def test_negative_omega_rejected(self):
        with pytest.raises(ParameterError):
            dv.closed_form_deviation(1.0, -1.0, 0.0)


class TestPhases:
    def test_zero_omega(self):
        assert dv.accumulated_phase(0.0, 123.4) == 0.0

    def test_full_turn(self):
        np.testing.assert_allclose(
            dv.accumulated_phase(2.0 * math.pi, 1.0), 2.0 * math.pi, rtol=1e-15
        )

    def test_exact_linearity(self):
        # binary-exact times make the additivity identity exact
        omega = 1.5
        assert dv.accumulated_phase(omega, 0.75) == dv.accumulated_phase(
            omega, 0.25
        ) + dv.accumulated_phase(omega, 0.5)

    def test_linearity_random(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            omega, t1, t2 = rng.uniform(0.1, 5.0, 3)
            total = dv.accumulated_phase(omega, t1 + t2)
            parts = dv.accumulated_phase(omega, t1) + dv.accumulated_phase(omega, t2)
            np.testing.assert_allclose(total, parts, rtol=1e-14)

    def test_phase_records_enumerate(self):
        records = dv.phase_records([1.0, 2.0, 3.0], 0.5)
        assert [r.mode_index for r in records] == [0, 1, 2]
        np.testing.assert_allclose([r.phase for r in records], [0.5, 1.0, 1.5])
        np.testing.assert_allclose([r.omega for r in records], [1.0, 2.0, 3.0])


class TestPhaseCorrelation:
    def test_identical_lists(self):
        rng = np.random.default_rng(5)
        records = dv.phase_records(rng.uniform(0.5, 2.0, 50), 7.0)
        np.testing.assert_allclose(
            dv.phase_correlation(records, records), 1.0, rtol=1e-12
        )

    def test_pi_shift_anticorrelates(self):
        rng = np.random.default_rng(6)
        phases = rng.uniform(0.0, 2.0 * math.pi, 50)
        a = tuple(
            dv.PhaseRecord(mode_index=i, omega=1.0, phase=p)
            for i, p in enumerate(phases)
        )
        b = tuple(
            dv.PhaseRecord(mode_index=i, omega=1.0, phase=p + math.pi)
            for i, p in enumerate(phases)
        )
        np.testing.assert_allclose(dv.phase_correlation(a, b), -1.0, rtol=1e-12)

    def test_independent_lists_uncorrelated(self):
        rng = np.random.default_rng(7)
        a = dv.phase_records(rng.uniform(0.0, 2.0 * math.pi, 10000), 1.0)
        b = dv.phase_records(rng.uniform(0.0, 2.0 * math.pi, 10000), 1.0)
        assert abs(dv.phase_correlation(a, b)) < 0.05

    def test_length_mismatch(self):
        a = dv.phase_records([1.0, 2.0], 1.0)
        b = dv.phase_records([1.0], 1.0)
        with pytest.raises(ParameterError):
            dv.phase_correlation(a, b)

    def test_index_mismatch(self):
        a = dv.phase_records([1.0, 2.0], 1.0)
        b = (
            dv.PhaseRecord(mode_index=1, omega=1.0, phase=0.3),
            dv.PhaseRecord(mode_index=0, omega=2.0, phase=0.4),
        )
        with pytest.raises(ParameterError):
            dv.phase_correlation(a, b)

    def test_zero_variance_undefined(self):
        a = dv.phase_records([1.0, 1.0, 1.0], 2.0)
        b = dv.phase_records([0.5, 1.5, 2.5], 2.0)
        with pytest.raises(UndefinedCorrelationError):
            dv.phase_correlation(a, b)


class TestTrajectoryCsv:
    def test_header_and_round_trip(self, tmp_path):
        traj = dv.integrate_deviation(
            REST, constant(1.0), tau_end=1.0, dt=0.01
        )
        path = tmp_path / "traj.csv"
        dv.write_trajectory_csv(traj, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "tau,ell_x,ell_y,ell_z,elldot_x,elldot_y,elldot_z"
        assert len(lines) == len(traj) + 1
        data = np.loadtxt(str(path), delimiter=",", skiprows=1)
        # 17 significant digits round-trip doubles exactly
        assert np.array_equal(data[:, 0], traj.taus)
        assert np.array_equal(data[:, 1:4], traj.ell)
        assert np.array_equal(data[:, 4:7], traj.ell_dot)
