import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import oracle_saturated_mean
from htbandits import (
    ArmModel,
    GpdNoise,
    NotEnoughSamplesError,
    ProblemParams,
    RngStream,
    SaturatedMeanEstimator,
    catoni_mean,
    sat,
    saturation_point,
    truncated_mean,
)
from htbandits.estimators import CatoniTracker, RunningMean, TruncatedMeanTracker


def make_params(horizon=10**4, num_arms=10, u=1.0, eps=1.0, a=1.1, eta=2.2):
    return ProblemParams(
        horizon=horizon,
        num_arms=num_arms,
        moment_scale=u,
        eps=eps,
        grid_base=a,
        inflation=eta,
    )


class TestSat:
    def test_clamp_above(self):
        assert sat(5.0, 2.0) == 2.0

    def test_sign_preserved(self):
        assert sat(-5.0, 2.0) == -2.0

    def test_identity_inside(self):
        assert sat(0.5, 2.0) == 0.5

    def test_bad_level(self):
        with pytest.raises(ValueError):
            sat(1.0, 0.0)

    @given(st.floats(-1e12, 1e12), st.floats(1e-6, 1e9))
    def test_odd_and_bounded(self, x, b):
        assert sat(-x, b) == -sat(x, b)
        assert abs(sat(x, b)) <= b

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(1e-6, 1e9))
    def test_non_expansive(self, x, y, b):
        assert abs(sat(x, b) - sat(y, b)) <= abs(x - y) + 1e-12


class TestSaturatedMeanEstimator:
    def test_empty_state_errors(self):
        est = SaturatedMeanEstimator(make_params())
        with pytest.raises(NotEnoughSamplesError):
            est.value()

    def test_first_zero_sample(self):
        est = SaturatedMeanEstimator(make_params())
        est.update(0.0)
        assert est.count == 1
        assert est.saturated_sum == 0.0
        assert est.value() == 0.0

    def test_single_clamped_sample(self):
        p = make_params(horizon=100, num_arms=10)
        est = SaturatedMeanEstimator(p)
        est.update(10.0)
        assert est.value() == saturation_point(1, p)

    def test_symmetric_pair_cancels(self):
        est = SaturatedMeanEstimator(make_params(), saturation_fn=lambda m: 1.5)
        est.update(1.0)
        est.update(-1.0)
        assert est.value() == 0.0

    def test_no_clamp_equals_plain_mean(self):
        # all samples well inside every saturation level ever used
        p = make_params(horizon=100, num_arms=10)
        est = SaturatedMeanEstimator(p)
        rng = np.random.default_rng(3)
        xs = rng.uniform(-0.1, 0.1, size=200)
        acc = 0.0
        for i, x in enumerate(xs, start=1):
            est.update(float(x))
            acc += float(x)
            assert est.value() == acc / i  # fold order identical, so exact

    def test_infinite_level_recovers_empirical_mean(self):
        est = SaturatedMeanEstimator(make_params(), saturation_fn=lambda m: math.inf)
        rng = np.random.default_rng(4)
        xs = rng.standard_cauchy(300)
        acc = 0.0
        for i, x in enumerate(xs, start=1):
            est.update(float(x))
            acc += float(x)
            assert est.value() == acc / i

    def test_saturation_tracks_pull_count(self):
        p = make_params()
        est = SaturatedMeanEstimator(p)
        rng = np.random.default_rng(5)
        for m in range(1, 400):
            est.update(float(rng.standard_t(df=2)))
            assert est.saturation == saturation_point(m, p)

    @pytest.mark.parametrize("eps", [1.0, 0.5])
    def test_incremental_matches_batch_oracle(self, eps):
        p = make_params(eps=eps)
        rng = np.random.default_rng(int(eps * 10))
        for _ in range(100):
            length = int(rng.integers(1, 300))
            mean = float(rng.uniform(-0.3, 0.3))
            xs = mean + rng.standard_t(df=2, size=length)
            est = SaturatedMeanEstimator(p)
            for m in range(1, length + 1):
                est.update(float(xs[m - 1]))
                expect = oracle_saturated_mean(
                    xs[:m], p.horizon, p.num_arms, p.moment_scale, p.eps, p.grid_base
                )
                got = est.value()
                assert abs(got - expect) <= 1e-9 * max(1.0, abs(expect))

    def test_raw_samples_retained(self):
        est = SaturatedMeanEstimator(make_params())
        xs = [1.0, -2.0, 3.0]
        for x in xs:
            est.update(x)
        assert np.array_equal(est.samples, np.array(xs))

    def test_bias_within_bennett_envelope_monte_carlo(self):
        # heavy-tailed zero-mean arm: |estimate| <= bias bound + 4 * std err
        p = make_params(horizon=10**6, num_arms=3)
        model = ArmModel(0.0, GpdNoise(0.33, 0.32))
        stream = RngStream(99, 0)
        from htbandits import sample_rewards

        xs = sample_rewards(model, stream, 10**5)
        est = SaturatedMeanEstimator(p)
        for x in xs:
            est.update(float(x))
        m = est.count
        b = saturation_point(m, p)
        bias_bound = p.moment_scale ** (1.0 + p.eps) / b**p.eps
        clamped = np.sign(xs) * np.minimum(np.abs(xs), b)
        stderr = float(np.std(clamped)) / math.sqrt(m)
        assert abs(est.value()) <= bias_bound + 4.0 * stderr


class TestRunningMean:
    def test_basic(self):
        rm = RunningMean()
        with pytest.raises(NotEnoughSamplesError):
            rm.value()
        rm.update(1.0)
        rm.update(2.0)
        assert rm.value() == 1.5


class TestTruncatedMean:
    def test_hand_example(self):
        # thresholds (1, sqrt 2, sqrt 3); only the middle sample survives
        result = truncated_mean([2.0, 1.0, 3.0], u=1.0, eps=1.0, delta=math.exp(-1))
        assert result == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_all_inside_gives_plain_mean(self):
        xs = [0.1, -0.2, 0.05, 0.15]
        got = truncated_mean(xs, u=1.0, eps=1.0, delta=0.1)
        assert got == pytest.approx(np.mean(xs), rel=1e-12)

    def test_zeros(self):
        assert truncated_mean([0.0, 0.0, 0.0], u=1.0, eps=1.0, delta=0.5) == 0.0

    def test_empty_errors(self):
        with pytest.raises(NotEnoughSamplesError):
            truncated_mean([], u=1.0, eps=1.0, delta=0.5)

    def test_delta_domain(self):
        with pytest.raises(ValueError):
            truncated_mean([1.0], u=1.0, eps=1.0, delta=1.5)


class TestCatoniMean:
    def test_symmetry_forces_zero(self):
        assert abs(catoni_mean([-1.0, 1.0], variance_bound=1.0, delta=0.5)) <= 1e-9

    def test_constant_samples(self):
        for c in (-2.5, 0.0, 3.25):
            got = catoni_mean([c] * 20, variance_bound=1.0, delta=0.05)
            assert got == pytest.approx(c, abs=1e-9)

    def test_not_enough_samples(self):
        with pytest.raises(NotEnoughSamplesError):
            catoni_mean([1.0, 2.0], variance_bound=1.0, delta=0.01)

    def test_monte_carlo_consistency(self):
        from htbandits import sample_rewards

        model = ArmModel(0.3, GpdNoise(0.33, 0.32))
        xs = sample_rewards(model, RngStream(7, 0), 10**4)
        got = catoni_mean(xs, variance_bound=1.0, delta=0.01)
        assert abs(got - 0.3) <= 0.05


class TestTrackers:
    def test_truncated_tracker_matches_batch(self):
        p = make_params()
        tracker = TruncatedMeanTracker(p)
        rng = np.random.default_rng(11)
        xs = 0.2 + rng.standard_t(df=2, size=400)
        t = p.num_arms
        for i, x in enumerate(xs, start=1):
            tracker.update(float(x))
            t += 3  # arbitrary increasing schedule
            got = tracker.estimate(t)
            expect = truncated_mean(xs[:i], p.moment_scale, p.eps, t**-2.0)
            assert abs(got - expect) <= 1e-9 * max(1.0, abs(expect))

    def test_truncated_tracker_rejects_decreasing_t(self):
        tracker = TruncatedMeanTracker(make_params())
        tracker.update(0.5)
        tracker.estimate(100)
        with pytest.raises(ValueError):
            tracker.estimate(50)

    def test_catoni_tracker_matches_batch(self):
        p = make_params()
        tracker = CatoniTracker(p)
        rng = np.random.default_rng(13)
        xs = -0.1 + rng.standard_t(df=3, size=300)
        for i, x in enumerate(xs, start=1):
            tracker.update(float(x))
            t = 10 + i
            if tracker.is_defined(t):
                got = tracker.estimate(t)
                expect = catoni_mean(xs[:i], p.moment_scale**2, t**-2.0)
                assert abs(got - expect) <= 1e-8 * max(1.0, abs(expect))

    def test_catoni_tracker_undefined_early(self):
        tracker = CatoniTracker(make_params())
        tracker.update(1.0)
        assert not tracker.is_defined(100)
        with pytest.raises(NotEnoughSamplesError):
            tracker.estimate(100)
