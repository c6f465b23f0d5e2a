"""
Tests for the Tracy-Widom distribution functions
"""
import logging
import math
import os
import sys

import numpy as np
import pytest

# Add the project directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from distributions import (
    DistributionEvaluator, EvaluatorRegistry, F4Convention, SummaryStats, tw_cdf, tw_moments,
    tw_pdf, tw_quantile,
)
from errors import DomainError, InvalidArgumentError
from fredholm import fredholm_det_f2

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

# mean, sd, skewness, excess kurtosis; the tolerance is one unit in the last printed digit
MOMENT_TABLE = {
    1: ((-1.20653, 1e-5), (1.2680, 1e-4), (0.293, 1e-3), (0.165, 1e-3)),
    2: ((-1.77109, 1e-5), (0.9018, 1e-4), (0.224, 1e-3), (0.093, 1e-3)),
    4: ((-2.30688, 1e-5), (0.7195, 1e-4), (0.166, 1e-3), (0.050, 1e-3)),
}


class TestMoments:
    """Reproduction of the published moments"""

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_moment_table(self, tw_registry, beta):
        stats = tw_moments(beta)
        (mean, tol_mean), (sd, tol_sd), (skew, tol_skew), (kurt, tol_kurt) = MOMENT_TABLE[beta]
        assert abs(stats.mean - mean) <= tol_mean
        assert abs(stats.sd - sd) <= tol_sd
        assert abs(stats.skewness - skew) <= tol_skew
        assert abs(stats.excess_kurtosis - kurt) <= tol_kurt
        assert stats.n is None

    def test_orderings(self, tw_registry):
        m1, m2, m4 = tw_moments(1), tw_moments(2), tw_moments(4)
        assert m4.mean < m2.mean < m1.mean
        assert m4.sd < m2.sd < m1.sd

    def test_scaled_symplectic_convention(self, tw_registry):
        table = tw_moments(4, F4Convention.TABLE)
        scaled = tw_moments(4, 'scaled')
        assert scaled.mean == pytest.approx(-3.2624, abs=2e-4)
        assert scaled.mean == pytest.approx(math.sqrt(2.0) * table.mean, rel=1e-6)
        assert scaled.sd == pytest.approx(math.sqrt(2.0) * table.sd, rel=1e-6)
        assert scaled.skewness == pytest.approx(table.skewness, abs=1e-5)

    def test_moments_are_cached(self, tw_registry):
        evaluator = tw_registry.evaluator(2)
        assert evaluator.moments() is evaluator.moments()

    def test_summary_dict_keys(self, tw_registry):
        data = tw_moments(2).to_dict()
        assert set(data) == {'mean', 'sd', 'skew', 'kurt', 'convention'}

    def test_degenerate_summary(self):
        stats = SummaryStats.from_moments(1.5, 0.0, 0.0, 0.0, n=10)
        assert stats.degenerate
        assert stats.sd == 0.0
        assert stats.to_dict()['degenerate'] is True


class TestCdf:
    """F_beta values and window handling"""

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_limits(self, tw_registry, beta):
        evaluator = tw_registry.evaluator(beta)
        lo, hi = evaluator.window
        assert tw_cdf(beta, lo) <= 1e-7
        assert tw_cdf(beta, hi) >= 1.0 - 1e-7

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_nondecreasing(self, tw_registry, beta):
        evaluator = tw_registry.evaluator(beta)
        values = evaluator.cdf_array(np.linspace(-8.0, 5.0, 500))
        assert np.all(np.diff(values) >= -1e-12)
        assert np.all((values >= 0.0) & (values <= 1.0))

    def test_matches_fredholm_determinant(self, tw_registry):
        assert abs(tw_cdf(2, -2.0) - fredholm_det_f2(-2.0, 100)) <= 1e-6

    def test_one_is_the_square_root_relation(self, tw_registry):
        # F1(s)^2 = exp(-J) F2(s)
        table = tw_registry.table
        for s in (-3.0, -1.0, 0.5):
            expected = math.exp(-table.at('J', s)) * tw_cdf(2, s)
            assert tw_cdf(1, s) ** 2 == pytest.approx(expected, rel=1e-10)

    def test_closed_forms_from_table_columns(self, tw_registry):
        table = tw_registry.table
        for sigma in (-6.0, -2.0, 0.0, 3.0):
            E, J = table.at('E', sigma), table.at('J', sigma)
            assert tw_cdf(2, sigma) == pytest.approx(math.exp(-E), rel=1e-12)
            assert tw_cdf(1, sigma) == pytest.approx(math.exp(-0.5 * (J + E)), rel=1e-12)
            # table convention reads the columns at sqrt(2) s
            f4 = math.cosh(0.5 * J) * math.exp(-0.5 * E)
            assert tw_cdf(4, sigma / math.sqrt(2.0), 'table') == pytest.approx(f4, rel=1e-10)

    def test_clamping_flag(self, tw_registry):
        evaluator = tw_registry.evaluator(2)
        assert evaluator.cdf_with_flag(-20.0) == (0.0, True)
        assert evaluator.cdf_with_flag(20.0) == (1.0, True)
        assert evaluator.cdf_with_flag(-math.inf) == (0.0, True)
        value, clamped = evaluator.cdf_with_flag(0.0)
        assert not clamped
        assert 0.0 < value < 1.0

    def test_nan_is_rejected(self, tw_registry):
        with pytest.raises(DomainError):
            tw_cdf(2, math.nan)

    def test_array_agrees_with_scalar(self, tw_registry):
        evaluator = tw_registry.evaluator(1)
        ss = np.array([-20.0, -4.0, -1.0, 0.0, 2.0, 20.0])
        expected = [evaluator.cdf(s) for s in ss]
        assert np.allclose(evaluator.cdf_array(ss), expected, rtol=1e-14, atol=0.0)

    @pytest.mark.parametrize('beta', [0, 3, 5, True, '2'])
    def test_invalid_beta(self, tw_registry, beta):
        with pytest.raises(InvalidArgumentError):
            tw_cdf(beta, 0.0)

    def test_unknown_convention(self, tw_registry):
        with pytest.raises(InvalidArgumentError):
            tw_cdf(4, 0.0, convention='halved')

    def test_convention_ignored_off_symplectic(self, tw_registry):
        assert tw_cdf(2, -1.0, convention='scaled') == tw_cdf(2, -1.0)


class TestPdf:
    """Densities against the CDF"""

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_finite_differences(self, tw_registry, beta):
        h = 1e-4
        for s in np.linspace(-5.0, 3.0, 50):
            numeric = (tw_cdf(beta, s + h) - tw_cdf(beta, s - h)) / (2.0 * h)
            analytic = tw_pdf(beta, s)
            assert abs(numeric - analytic) <= 1e-5 * analytic + 1e-10

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_normalised(self, tw_registry, beta):
        assert abs(tw_registry.evaluator(beta).total_mass() - 1.0) <= 1e-6

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_right_tail(self, tw_registry, beta):
        evaluator = tw_registry.evaluator(beta)
        assert tw_pdf(beta, evaluator.window[1]) <= 1e-6
        assert tw_pdf(beta, 50.0) == 0.0

    def test_nonnegative(self, tw_registry):
        for beta in (1, 2, 4):
            assert np.all(tw_registry.evaluator(beta).pdf_values >= -1e-12)

    def test_mode(self, tw_registry):
        ss = np.linspace(-6.0, 3.0, 901)
        densities = [tw_pdf(2, s) for s in ss]
        mode = ss[int(np.argmax(densities))]
        assert -3.0 < mode < 0.0


class TestQuantile:
    """Inverse CDF"""

    @pytest.mark.parametrize('beta', [1, 2, 4])
    def test_median_round_trip(self, tw_registry, beta):
        assert abs(tw_cdf(beta, tw_quantile(beta, 0.5)) - 0.5) <= 1e-8

    def test_inverse_of_cdf(self, tw_registry):
        assert abs(tw_quantile(2, tw_cdf(2, -1.0)) + 1.0) <= 1e-8

    def test_median_within_one_sd_of_mean(self, tw_registry):
        assert -2.47 < tw_quantile(1, 0.5) < 0.06

    def test_monotone(self, tw_registry):
        assert tw_quantile(2, 0.25) < tw_quantile(2, 0.75)

    @pytest.mark.parametrize('p', [0.0, 1e-8, 1.0, 1.5, -0.1])
    def test_out_of_range(self, tw_registry, p):
        with pytest.raises(DomainError):
            tw_quantile(2, p)


class TestRegistry:
    """Evaluator sharing"""

    def test_evaluators_are_shared(self, tw_registry):
        assert tw_registry.evaluator(2) is tw_registry.evaluator(2)
        assert tw_registry.evaluator(4, 'table') is not tw_registry.evaluator(4, 'scaled')

    def test_loader_runs_once(self, painleve_table):
        calls = []

        def loader():
            calls.append(1)
            return painleve_table

        local = EvaluatorRegistry(loader)
        local.evaluator(1)
        local.evaluator(2)
        assert len(calls) == 1

    def test_table_without_integrals(self, painleve_table):
        from painleve import PainleveTable
        bare = PainleveTable(grid=painleve_table.grid, q=painleve_table.q,
                             q_prime=painleve_table.q_prime, tol=painleve_table.tol)
        with pytest.raises(InvalidArgumentError):
            DistributionEvaluator(2, bare)
