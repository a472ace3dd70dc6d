"""Tests for the metric-weighted correlator and the Bell-type observable."""

import math

import numpy as np
import pytest

from gravbell import background as bg
from gravbell import bell as bl
from gravbell.errors import ParameterError

REFERENCE_ANGLES = (0.0, -math.pi / 2, -math.pi / 4, math.pi / 4)
FLAT = bg.BackgroundEnsemble(modes=(), sigma=0.0, seed=0, h_max=1e-3)
A0 = bl.PolarizerSetting(0.0)


class TestPolarizerSetting:
    def test_unit_vector(self):
        rng = np.random.default_rng(2)
        for angle in rng.uniform(-10.0, 10.0, 100):
            v = bl.PolarizerSetting(angle).vector
            assert abs(np.linalg.norm(v) - 1.0) <= 1e-14
            assert v[2] == 0.0

    def test_rotation_convention(self):
        v = bl.PolarizerSetting(math.pi / 2).vector
        np.testing.assert_allclose(v, [0.0, 1.0, 0.0], atol=1e-15)

    def test_non_finite_angle(self):
        with pytest.raises(ParameterError):
            bl.PolarizerSetting(float("inf"))


class TestCorrelationAnalytic:
    def test_aligned(self):
        assert bl.correlation_analytic(0.0) == 1.0

    def test_quarter_turn(self):
        np.testing.assert_allclose(
            bl.correlation_analytic(math.pi / 4), 0.7071067811865476, rtol=1e-15
        )

    def test_orthogonal(self):
        assert bl.correlation_analytic(math.pi / 2) <= 1e-12

    def test_absolute_value(self):
        np.testing.assert_allclose(
            bl.correlation_analytic(3.0 * math.pi / 4),
            bl.correlation_analytic(math.pi / 4),
            rtol=1e-15,
        )


class TestBellObservable:
    def test_reference_angle_set(self):
        settings = bl.BellSettings.from_angles(*REFERENCE_ANGLES)
        value = bl.bell_observable(settings, bl.cosine_correlator)
        assert abs(value - bl.SQRT2) <= 1e-12

    def test_equal_angles(self):
        settings = bl.BellSettings.from_angles(0.7, 0.7, 0.7, 0.7)
        np.testing.assert_allclose(
            bl.bell_observable(settings, bl.cosine_correlator), 1.0, rtol=1e-15
        )

    def test_matches_direct_four_term_formula(self):
        a, ap, b, bp = 0.3, 1.1, 2.0, 0.7
        settings = bl.BellSettings.from_angles(a, ap, b, bp)
        expected = abs(
            0.5
            * (
                math.cos(b - a)
                + math.cos(b - ap)
                + math.cos(bp - a)
                - math.cos(bp - ap)
            )
        )
        np.testing.assert_allclose(
            bl.bell_observable(settings, bl.cosine_correlator), expected, rtol=1e-15
        )

    def test_bound_over_random_quadruples(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            settings = bl.BellSettings.from_angles(
                *rng.uniform(0.0, 2.0 * math.pi, 4)
            )
            value = bl.bell_observable(settings, bl.cosine_correlator)
            assert value <= bl.SQRT2 + 1e-9

    def test_global_rotation_invariance(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            angles = rng.uniform(0.0, 2.0 * math.pi, 4)
            shift = rng.uniform(-10.0, 10.0)
            v0 = bl.bell_observable(
                bl.BellSettings.from_angles(*angles), bl.cosine_correlator
            )
            v1 = bl.bell_observable(
                bl.BellSettings.from_angles(*(angles + shift)), bl.cosine_correlator
            )
            np.testing.assert_allclose(v1, v0, atol=1e-12)


class TestCheckBound:
    def test_at_bound(self):
        out = bl.check_bound(bl.SQRT2)
        assert out.within_bound
        assert out.margin == 0.0

    def test_inside(self):
        out = bl.check_bound(1.0)
        assert out.within_bound
        np.testing.assert_allclose(out.margin, bl.SQRT2 - 1.0, rtol=1e-15)

    def test_outside(self):
        out = bl.check_bound(1.5)
        assert not out.within_bound
        np.testing.assert_allclose(out.margin, bl.SQRT2 - 1.5, rtol=1e-12)


class TestCorrelationMc:
    def test_flat_aligned_normalization(self):
        est = bl.correlation_mc(FLAT, A0, bl.PolarizerSetting(0.0), 100000, seed=1)
        assert abs(est.mean - 1.0) <= 3.0 * est.stderr
        assert abs(est.metric_factor_mean - 1.0) <= 3.0 * est.stderr
        assert est.n_samples == 100000

    def test_flat_matches_cosine(self):
        rng = np.random.default_rng(31)
        hits = 0
        for k in range(5):
            theta = rng.uniform(0.0, math.pi)
            est = bl.correlation_mc(
                FLAT, A0, bl.PolarizerSetting(theta), 20000, seed=50 + k
            )
            if abs(est.mean - math.cos(theta)) <= 3.0 * est.stderr:
                hits += 1
        assert hits >= 4

    def test_third_pi_magnitude(self):
        est = bl.correlation_mc(
            FLAT, A0, bl.PolarizerSetting(math.pi / 3), 100000, seed=2
        )
        assert abs(abs(est.mean) - 0.5) <= 3.0 * est.stderr

    def test_deterministic_bits(self):
        a = bl.correlation_mc(FLAT, A0, bl.PolarizerSetting(0.4), 5000, seed=9)
        b = bl.correlation_mc(FLAT, A0, bl.PolarizerSetting(0.4), 5000, seed=9)
        assert a == b

    def test_streams_differ(self):
        a = bl.correlation_mc(FLAT, A0, bl.PolarizerSetting(0.4), 5000, seed=9)
        b = bl.correlation_mc(
            FLAT, A0, bl.PolarizerSetting(0.4), 5000, seed=9, stream=1
        )
        assert a.mean != b.mean

    def test_stderr_scales_inverse_root_n(self):
        errs = []
        for n in (1000, 10000, 100000):
            est = bl.correlation_mc(FLAT, A0, bl.PolarizerSetting(0.2), n, seed=3)
            errs.append(est.stderr)
        for ratio in (errs[0] / errs[1], errs[1] / errs[2]):
            assert abs(ratio - math.sqrt(10.0)) <= 0.2 * math.sqrt(10.0)

    def test_weak_field_metric_factor_near_one(self):
        ens = bg.sample_ensemble(8, 3e-4, 0.5, 2.0, 1e-3, seed=5)
        est = bl.correlation_mc(
            ens, A0, bl.PolarizerSetting(0.9), 100000, seed=11
        )
        assert abs(est.metric_factor_mean - 1.0) <= 1e-2

    def test_metric_factor_scales_linearly_with_h(self):
        # ensembles differing by an exact amplitude factor of 10 share the
        # same draws, so the linear-in-h parts cancel in the combination
        # (mfm_large - 1) - 10 (mfm_small - 1) up to flat-space noise
        import dataclasses

        large = bg.sample_ensemble(8, 3e-4, 0.5, 2.0, 1e-3, seed=5)
        small = bg.BackgroundEnsemble(
            modes=tuple(
                dataclasses.replace(
                    m, amp_plus=m.amp_plus / 10.0, amp_cross=m.amp_cross / 10.0
                )
                for m in large.modes
            ),
            sigma=large.sigma,
            seed=large.seed,
            h_max=1e-4,
        )
        kwargs = dict(n_trials=100000, seed=13)
        est_large = bl.correlation_mc(large, A0, bl.PolarizerSetting(0.3), **kwargs)
        est_small = bl.correlation_mc(small, A0, bl.PolarizerSetting(0.3), **kwargs)
        stat = (est_large.metric_factor_mean - 1.0) - 10.0 * (
            est_small.metric_factor_mean - 1.0
        )
        # 3 sigma of the residual flat-space term, std = 9 sqrt(0.8/n)
        assert abs(stat) <= 0.08

    def test_trials_floor(self):
        with pytest.raises(ParameterError):
            bl.correlation_mc(FLAT, A0, bl.PolarizerSetting(0.1), 99, seed=0)

    def test_invalid_ensemble_rejected(self):
        broken = bg.BackgroundEnsemble(
            modes=(bg.GwMode((0.0, 0.0, 2.0), 1.0, 1e-4, 0.0, 0.0),),
            sigma=0.0,
            seed=0,
            h_max=1e-3,
        )
        with pytest.raises(ParameterError):
            bl.correlation_mc(broken, A0, bl.PolarizerSetting(0.1), 1000, seed=0)


class TestMaximizeObservable:
    def test_cosine_reaches_bound(self):
        settings, value = bl.maximize_observable(bl.cosine_correlator)
        assert abs(value - bl.SQRT2) <= 1e-6
        a, ap, b, bp = settings.angles
        for diff in (b - a, b - ap, bp - a, bp - ap):
            np.testing.assert_allclose(
                abs(math.cos(diff)), math.sqrt(0.5), atol=1e-5
            )

    def test_zero_correlator(self):
        _, value = bl.maximize_observable(lambda x, y: 0.0)
        assert value == 0.0

    def test_half_cosine_scales(self):
        _, value = bl.maximize_observable(
            lambda x, y: 0.5 * math.cos(y - x)
        )
        assert abs(value - bl.SQRT2 / 2.0) <= 1e-6

    def test_parameter_floors(self):
        with pytest.raises(ParameterError):
            bl.maximize_observable(bl.cosine_correlator, coarse_steps=7)
        with pytest.raises(ParameterError):
            bl.maximize_observable(bl.cosine_correlator, refine_iters=9)
