"""
Tests for the empirical CDF, KS distance and sample statistics
"""
import logging
import math
import os
import sys

import numpy as np
import pytest

# Add the project directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import InvalidArgumentError
from gof import ecdf, histogram, ks_distance, summary_stats

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')


def uniform_cdf(x):
    return min(max(x, 0.0), 1.0)


class TestEcdf:
    """Empirical distribution function"""

    def test_right_continuous_steps(self):
        f = ecdf([3.0, 1.0, 2.0, 2.0])
        assert f(0.5) == 0.0
        assert f(1.0) == 0.25
        assert f(2.0) == 0.75
        assert f(2.5) == 0.75
        assert f(3.0) == 1.0

    def test_array_input(self):
        f = ecdf([0.0, 1.0])
        assert np.array_equal(f(np.array([-1.0, 0.0, 0.5, 1.0])), [0.0, 0.5, 0.5, 1.0])

    @pytest.mark.parametrize('values', [[], [1.0, math.nan], [math.inf]])
    def test_rejects_bad_samples(self, values):
        with pytest.raises(InvalidArgumentError):
            ecdf(values)


class TestKsDistance:
    """Two-sided Kolmogorov-Smirnov distance"""

    def test_single_point(self):
        assert ks_distance([0.5], uniform_cdf) == pytest.approx(0.5)
        assert ks_distance([0.25], uniform_cdf) == pytest.approx(0.75)

    def test_perfect_grid(self):
        n = 10
        samples = (np.arange(1, n + 1) - 0.5) / n
        assert ks_distance(samples, uniform_cdf) == pytest.approx(0.5 / n)

    def test_all_mass_outside(self):
        assert ks_distance([5.0, 6.0], uniform_cdf) == 1.0

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(8)
        samples = rng.standard_normal(300)
        from scipy.stats import norm
        scalar = ks_distance(samples, lambda x: float(norm.cdf(x)))
        vector = ks_distance(samples, norm.cdf, vectorized=True)
        assert scalar == pytest.approx(vector, abs=1e-15)

    def test_invariant_under_monotone_maps(self):
        rng = np.random.default_rng(9)
        samples = rng.uniform(0.0, 1.0, 200)
        direct = ks_distance(samples, uniform_cdf)
        mapped = ks_distance(np.exp(samples), lambda y: uniform_cdf(math.log(y)))
        assert mapped == pytest.approx(direct, abs=1e-12)

    def test_agrees_with_scipy(self):
        from scipy.stats import kstest, norm
        rng = np.random.default_rng(10)
        samples = rng.standard_normal(500)
        assert ks_distance(samples, norm.cdf, vectorized=True) == pytest.approx(
            kstest(samples, 'norm').statistic, abs=1e-12)

    def test_small_for_large_matching_sample(self):
        rng = np.random.default_rng(12)
        assert ks_distance(rng.uniform(size=20000), uniform_cdf) < 0.02

    def test_kolmogorov_envelope(self):
        # 1.63 / sqrt(n) is the 99th percentile of sqrt(n) D_n, so about one run in 100 lands above it
        n = 400
        rng = np.random.default_rng(15)
        distances = [ks_distance(rng.uniform(size=n), uniform_cdf) for _ in range(100)]
        misses = sum(d > 1.63 / math.sqrt(n) for d in distances)
        assert misses <= 3


class TestSummaryStats:
    """Population moments"""

    def test_four_points(self):
        stats = summary_stats([1.0, 2.0, 3.0, 4.0])
        assert stats.mean == pytest.approx(2.5)
        assert stats.sd == pytest.approx(math.sqrt(1.25))
        assert stats.skewness == pytest.approx(0.0, abs=1e-15)
        assert stats.excess_kurtosis == pytest.approx(-1.36)
        assert stats.n == 4

    def test_three_points(self):
        stats = summary_stats([-1.0, 0.0, 1.0])
        assert stats.mean == pytest.approx(0.0, abs=1e-15)
        assert stats.sd == pytest.approx(math.sqrt(2.0 / 3.0))
        assert stats.skewness == pytest.approx(0.0, abs=1e-15)
        assert stats.excess_kurtosis == pytest.approx(-1.5)

    def test_normal_sample(self):
        stats = summary_stats(np.random.default_rng(16).standard_normal(10 ** 6))
        assert abs(stats.mean) <= 0.01
        assert stats.sd == pytest.approx(1.0, abs=0.01)
        assert abs(stats.skewness) <= 0.02
        assert abs(stats.excess_kurtosis) <= 0.02

    def test_affine_equivariance(self):
        rng = np.random.default_rng(13)
        x = rng.gamma(2.0, size=1000)
        base, moved = summary_stats(x), summary_stats(3.0 * x - 7.0)
        assert moved.mean == pytest.approx(3.0 * base.mean - 7.0)
        assert moved.sd == pytest.approx(3.0 * base.sd)
        assert moved.skewness == pytest.approx(base.skewness)
        assert moved.excess_kurtosis == pytest.approx(base.excess_kurtosis)

    def test_constant_sample_is_degenerate(self):
        stats = summary_stats([2.0, 2.0, 2.0])
        assert stats.degenerate
        assert stats.mean == 2.0
        assert stats.sd == 0.0

    def test_needs_two_values(self):
        with pytest.raises(InvalidArgumentError):
            summary_stats([1.0])


class TestHistogram:
    """Density histograms"""

    def test_integrates_to_one(self):
        rng = np.random.default_rng(14)
        hist = histogram(rng.standard_normal(5000), bins=40)
        assert np.sum(hist.density * np.diff(hist.edges)) == pytest.approx(1.0)
        assert len(hist.centers) == 40

    def test_fixed_range(self):
        hist = histogram([0.1, 0.2, 0.7], bins=2, value_range=(0.0, 1.0))
        assert np.allclose(hist.edges, [0.0, 0.5, 1.0])
        assert np.allclose(hist.density, [4.0 / 3.0, 2.0 / 3.0])

    def test_bad_bins(self):
        with pytest.raises(InvalidArgumentError):
            histogram([1.0, 2.0], bins=0)
