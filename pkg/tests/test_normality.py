import numpy as np
import pytest
from scipy import stats

from interfere.core.exceptions import SampleError
from interfere.core.normality import (empirical_moments, ks_uniformity, shapiro_wilk, sw_coefficients,
                                      wasserstein_to_gaussian)


class TestShapiroWilk:
    @pytest.mark.parametrize('n', [3, 4, 5, 7, 11, 12, 40, 500])
    def test_agrees_with_scipy(self, n):
        sample = np.random.default_rng(n).normal(size=n)
        ours = shapiro_wilk(sample)
        reference = stats.shapiro(sample)
        assert ours.statistic == pytest.approx(reference.statistic, abs=1e-4)
        assert ours.p_value == pytest.approx(reference.pvalue, abs=1e-4)

    @pytest.mark.parametrize('n', [10, 100, 500, 2000])
    def test_agrees_with_scipy_over_many_samples(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(50):
            sample = rng.normal(size=n)
            ours = shapiro_wilk(sample)
            reference = stats.shapiro(sample)
            assert ours.statistic == pytest.approx(reference.statistic, abs=1e-3)
            assert ours.p_value == pytest.approx(reference.pvalue, abs=1e-3)

    def test_skewed_sample_agrees_with_scipy(self):
        sample = np.random.default_rng(1).exponential(size=60)
        reference = stats.shapiro(sample)
        assert shapiro_wilk(sample).statistic == pytest.approx(reference.statistic, abs=1e-4)

    def test_coefficients_are_antisymmetric_and_normalised(self):
        for n in (3, 6, 25, 101):
            a = sw_coefficients(n)
            assert np.allclose(a, -a[::-1])
            assert np.dot(a, a) == pytest.approx(1.0, abs=1e-3)

    def test_affine_invariance(self):
        sample = np.random.default_rng(2).normal(size=80)
        base = shapiro_wilk(sample)
        moved = shapiro_wilk(3.5 * sample - 120.0)
        assert moved.statistic == pytest.approx(base.statistic, abs=1e-12)
        assert moved.p_value == pytest.approx(base.p_value, abs=1e-10)

    def test_statistic_is_at_most_one(self):
        for seed in range(20):
            assert shapiro_wilk(np.random.default_rng(seed).normal(size=30)).statistic <= 1.0 + 1e-12

    def test_heavy_skew_is_rejected(self):
        assert shapiro_wilk(np.random.default_rng(3).exponential(size=500)).p_value < 1e-3

    @pytest.mark.parametrize('sample', [[1.0, 2.0], list(range(5001))])
    def test_size_limits(self, sample):
        with pytest.raises(SampleError):
            shapiro_wilk(sample)

    def test_constant_sample(self):
        with pytest.raises(SampleError, match="zero variance"):
            shapiro_wilk([2.0] * 10)

    def test_non_finite(self):
        with pytest.raises(SampleError):
            shapiro_wilk([1.0, np.nan, 2.0, 3.0])

    @pytest.mark.slow
    def test_null_rejection_rate(self):
        rng = np.random.default_rng(11)
        p_values = [shapiro_wilk(rng.normal(size=500)).p_value for _ in range(2000)]
        assert 0.03 <= np.mean(np.array(p_values) < 0.05) <= 0.07

    @pytest.mark.slow
    def test_null_p_values_look_uniform(self):
        rng = np.random.default_rng(12)
        p_values = [shapiro_wilk(rng.normal(size=500)).p_value for _ in range(200)]
        assert ks_uniformity(p_values) > 0.01


class TestSummaries:
    def test_moments(self):
        m = empirical_moments([1.0, 2.0, 3.0, 4.0, 5.0])
        assert m.mean == pytest.approx(3.0)
        assert m.variance == pytest.approx(2.5)
        assert m.skewness == pytest.approx(0.0, abs=1e-12)

    def test_constant_sample_has_zero_variance(self):
        m = empirical_moments([4.0] * 6)
        assert m.variance == 0.0
        assert np.isnan(m.skewness)

    def test_too_small(self):
        with pytest.raises(SampleError):
            empirical_moments([1.0])

    def test_ks_uniformity_rejects_clustered_values(self):
        assert ks_uniformity(np.full(100, 0.01)) < 1e-6

    def test_wasserstein(self):
        rng = np.random.default_rng(4)
        assert wasserstein_to_gaussian(rng.normal(size=2000)) < 0.05
        assert wasserstein_to_gaussian(rng.exponential(size=2000)) > 0.05
