import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinwatch.detection import (
    DetectionThreshold,
    DetectionWeights,
    NormalizationBounds,
    SamplerConfig,
    analytic_detection_rate,
    calibrate_exceedance,
    calibrate_weights,
    detection_probability,
    normalize_angle,
    normalize_density,
    normalize_distance,
    trajectory_detected,
)
from twinwatch.errors import DomainError

B = NormalizationBounds()
EQUAL = DetectionWeights.equal()


class TestNormalizations:
    def test_angle_frontal(self):
        assert normalize_angle(0.0, B) == 1.0

    def test_angle_profile(self):
        assert normalize_angle(90.0, B) == 0.0

    def test_angle_beyond_max_is_zero(self):
        assert normalize_angle(120.0, B) == 0.0
        assert normalize_angle(90.0001, B) == 0.0

    def test_angle_midpoint(self):
        assert normalize_angle(45.0, B) == pytest.approx(0.5, abs=1e-12)

    def test_angle_negative_rejected(self):
        with pytest.raises(DomainError):
            normalize_angle(-1.0, B)

    def test_distance_at_minimum(self):
        assert normalize_distance(1.0, B) == 0.0

    def test_distance_midband(self):
        assert normalize_distance(10.0, B) == pytest.approx(0.5, abs=1e-12)

    def test_distance_below_minimum_clamps(self):
        assert normalize_distance(0.4, B) == 0.0

    def test_distance_at_optical_max_clamps(self):
        assert normalize_distance(19.0, B) == 1.0
        assert normalize_distance(25.0, B) == 1.0

    def test_density(self):
        assert normalize_density(0, B) == 0.0
        assert normalize_density(9, B) == pytest.approx(0.5)
        assert normalize_density(18, B) == 1.0
        assert normalize_density(25, B) == 1.0

    def test_boundary_exactness(self):
        assert normalize_angle(B.a_max, B) == 0.0
        assert normalize_density(B.n_max, B) == 1.0
        assert normalize_distance(B.d_min, B) == 0.0

    def test_inverted_variants(self):
        inv = NormalizationBounds(inverted_dn=True)
        assert normalize_distance(1.0, inv) == 1.0
        assert normalize_distance(19.0, inv) == 0.0
        assert normalize_density(18, inv) == 0.0
        # the angle map is unaffected by the flag
        assert normalize_angle(0.0, inv) == 1.0


class TestDetectionProbability:
    def test_only_angle_term(self):
        # a frontal view at minimum distance with nobody in view
        assert detection_probability(0.0, 1.0, 0, EQUAL, B) == pytest.approx(1 / 3)

    def test_all_terms_saturated(self):
        w = DetectionWeights(0.2, 0.5, 0.3)
        assert detection_probability(0.0, 19.0, 18, w, B) == pytest.approx(1.0)

    def test_angle_beyond_max_kills_angle_term(self):
        assert detection_probability(100.0, 1.0, 0, EQUAL, B) == 0.0

    def test_weight_sum_enforced(self):
        with pytest.raises(DomainError):
            DetectionWeights(0.5, 0.5, 0.5)
        with pytest.raises(DomainError):
            DetectionWeights(-0.1, 0.6, 0.5)

    @given(a=st.floats(0, 180), d=st.floats(0, 30), n=st.integers(0, 40))
    @settings(max_examples=200)
    def test_output_in_unit_interval(self, a, d, n):
        p = detection_probability(a, d, n, EQUAL, B)
        assert 0.0 <= p <= 1.0

    @given(a=st.floats(0, 180), d=st.floats(0, 30), n=st.integers(0, 40),
           raw=st.tuples(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1)))
    @settings(max_examples=100)
    def test_convexity_bounds(self, a, d, n, raw):
        s = sum(raw)
        w = DetectionWeights(raw[0] / s, raw[1] / s, raw[2] / s)
        terms = [normalize_angle(a, B), normalize_distance(d, B),
                 normalize_density(n, B)]
        p = detection_probability(a, d, n, w, B)
        assert min(terms) - 1e-12 <= p <= max(terms) + 1e-12

    @given(a1=st.floats(0, 180), a2=st.floats(0, 180),
           d1=st.floats(0, 30), d2=st.floats(0, 30),
           n1=st.integers(0, 40), n2=st.integers(0, 40))
    @settings(max_examples=200)
    def test_monotonicity(self, a1, a2, d1, d2, n1, n2):
        # non-increasing in angle, non-decreasing in distance and density
        lo_a, hi_a = min(a1, a2), max(a1, a2)
        lo_d, hi_d = min(d1, d2), max(d1, d2)
        lo_n, hi_n = min(n1, n2), max(n1, n2)
        assert (detection_probability(hi_a, lo_d, lo_n, EQUAL, B)
                <= detection_probability(lo_a, lo_d, lo_n, EQUAL, B) + 1e-12)
        assert (detection_probability(lo_a, lo_d, lo_n, EQUAL, B)
                <= detection_probability(lo_a, hi_d, lo_n, EQUAL, B) + 1e-12)
        assert (detection_probability(lo_a, lo_d, lo_n, EQUAL, B)
                <= detection_probability(lo_a, lo_d, hi_n, EQUAL, B) + 1e-12)

    def test_rescaled_weights_leave_score_unchanged(self):
        w = DetectionWeights(0.2, 0.5, 0.3)
        scaled = (0.2 * 7, 0.5 * 7, 0.3 * 7)
        total = sum(scaled)
        w2 = DetectionWeights(*(x / total for x in scaled))
        for a, d, n in [(0, 1, 0), (30, 10, 5), (80, 18, 18)]:
            assert detection_probability(a, d, n, w, B) == pytest.approx(
                detection_probability(a, d, n, w2, B), abs=1e-12)


class TestThresholdRule:
    T = DetectionThreshold(0.45)

    def test_inclusive_at_threshold(self):
        assert trajectory_detected([0.30, 0.45], self.T) is True

    def test_strict_shortfall(self):
        assert trajectory_detected([0.449, 0.20], self.T) is False

    def test_empty_is_undetected(self):
        assert trajectory_detected([], self.T) is False

    def test_threshold_domain(self):
        with pytest.raises(DomainError):
            DetectionThreshold(0.0)
        with pytest.raises(DomainError):
            DetectionThreshold(1.0)


class TestAnalyticRate:
    def test_single_camera_identity(self):
        for p in [0.0, 0.2, 0.77, 1.0]:
            assert analytic_detection_rate(p, 1) == pytest.approx(p)

    def test_zero_exceedance(self):
        for m in [0, 1, 5, 50]:
            assert analytic_detection_rate(0.0, m) == 0.0

    def test_base_calibration_value(self):
        # independent derivation of the six-camera exceedance for rate 0.74
        p_star = 1.0 - 0.26 ** (1.0 / 6.0)
        assert calibrate_exceedance(0.74, 6) == pytest.approx(p_star, abs=1e-15)
        assert p_star == pytest.approx(0.2011, abs=5e-4)
        assert analytic_detection_rate(p_star, 6) == pytest.approx(0.74, abs=1e-12)

    def test_camera_count_scaling_from_base(self):
        p_star = calibrate_exceedance(0.74, 6)
        assert analytic_detection_rate(p_star, 9) == pytest.approx(0.867, abs=5e-4)
        assert analytic_detection_rate(p_star, 11) == pytest.approx(0.915, abs=5e-4)

    def test_monte_carlo_agreement(self):
        # Bernoulli oracle: m independent draws per trajectory, 10^6 total
        rng = np.random.default_rng(123)
        p, m, n = calibrate_exceedance(0.74, 6), 6, 200_000
        hits = (rng.random((n, m)) < p).any(axis=1).mean()
        expected = analytic_detection_rate(p, m)
        se = math.sqrt(expected * (1 - expected) / n)
        assert abs(hits - expected) < 3 * se

    def test_camera_count_monotonicity(self):
        for p in [0.01, 0.2, 0.5, 0.99]:
            rates = [analytic_detection_rate(p, m) for m in range(0, 30)]
            assert all(b >= a for a, b in zip(rates, rates[1:]))
            # strictly increasing until float saturation at 1.0
            assert all(b > a for a, b in zip(rates, rates[1:]) if b < 1.0)
        rates0 = [analytic_detection_rate(0.0, m) for m in range(0, 30)]
        assert set(rates0) == {0.0}

    @given(r=st.floats(0.001, 0.999), m=st.integers(1, 40))
    @settings(max_examples=100)
    def test_roundtrip_identity(self, r, m):
        assert analytic_detection_rate(calibrate_exceedance(r, m), m) == \
            pytest.approx(r, abs=1e-12)

    def test_calibrate_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            calibrate_exceedance(0.0, 6)
        with pytest.raises(DomainError):
            calibrate_exceedance(1.0, 6)
        with pytest.raises(DomainError):
            calibrate_exceedance(0.5, 0)


class TestWeightCalibration:
    def test_reaches_base_target(self):
        sampler = SamplerConfig(trajectories=10_000, seed=11)
        result = calibrate_weights(0.74, 6, sampler, DetectionThreshold(0.45))
        assert result.converged
        assert abs(result.achieved_rate - 0.74) <= 0.02

    def test_tie_break_returns_equal_weights(self):
        # score equal weights first, then ask for exactly that rate; one
        # camera keeps the equal-weight rate strictly inside (0, 1)
        sampler = SamplerConfig(trajectories=5_000, seed=21)
        a, d, n = sampler.draw_normalized_terms(1)
        eq = DetectionWeights.equal()
        p = eq.w_a * a + eq.w_d * d + eq.w_n * n
        rate = float((p.max(axis=1) >= 0.45).mean())
        assert 0.0 < rate < 1.0
        result = calibrate_weights(rate, 1, sampler, DetectionThreshold(0.45))
        assert result.weights == eq
        assert result.achieved_rate == pytest.approx(rate, abs=1e-12)

    def test_target_one_rejected(self):
        sampler = SamplerConfig(trajectories=100, seed=0)
        with pytest.raises(DomainError):
            calibrate_weights(1.0, 6, sampler, DetectionThreshold(0.45))

    def test_budget_exhaustion_flagged(self):
        sampler = SamplerConfig(trajectories=1_000, seed=3)
        result = calibrate_weights(0.74, 6, sampler, DetectionThreshold(0.45),
                                   budget=50)
        assert not result.converged
        assert result.evaluations == 50

    def test_accepts_preset_object(self, layout):
        from twinwatch.station import builtin_preset
        preset = builtin_preset("Base", layout)
        sampler = SamplerConfig(trajectories=2_000, seed=5)
        result = calibrate_weights(0.74, preset, sampler, DetectionThreshold(0.45))
        assert 0 <= result.achieved_rate <= 1
