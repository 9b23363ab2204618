"""Tests for special-function helpers."""

import math

import pytest
from scipy import stats

from core.special import chi2_cdf, gamma_ratio, student_cdf, student_pdf, student_ppf, student_sf


def test_gamma_ratio() -> None:
    assert gamma_ratio(5.0, 3.0) == pytest.approx(12.0, rel=1e-13)
    assert gamma_ratio(200.0, 199.5) == pytest.approx(
        math.exp(math.lgamma(200.0) - math.lgamma(199.5)), rel=1e-12
    )


def test_chi2_cdf() -> None:
    assert chi2_cdf(3.0, 0.0) == 0.0
    assert chi2_cdf(3.0, 2.5) == pytest.approx(stats.chi2.cdf(2.5, 3.0), rel=1e-12)


class TestStudent:
    """Test the Student distribution helpers."""

    def test_nu_two_closed_form(self) -> None:
        """Test P(T > t) = (1 - t / sqrt(2 + t^2)) / 2 for nu = 2."""
        for t in [-3.0, 0.0, 0.5, 40.0]:
            expected = 0.5 * (1.0 - t / math.sqrt(2.0 + t * t))
            assert student_sf(2.0, t) == pytest.approx(expected, rel=1e-12)
            assert student_cdf(2.0, t) == pytest.approx(1.0 - expected, rel=1e-12)

    @pytest.mark.parametrize("nu", [1.0, 2.0, 3.5, 30.0])
    @pytest.mark.parametrize("alpha", [1e-9, 0.01, 0.3, 0.5, 0.9, 0.999, 1 - 1e-9])
    def test_ppf_matches_scipy(self, nu: float, alpha: float) -> None:
        assert student_ppf(nu, alpha) == pytest.approx(stats.t.ppf(alpha, nu), rel=1e-9, abs=1e-12)

    def test_far_tail_keeps_precision(self) -> None:
        """Test the upper quantile at 1 - 1e-12 through the survival function."""
        t = student_ppf(2.0, 1.0 - 1e-12)
        assert student_sf(2.0, t) == pytest.approx(1e-12, rel=1e-6)

    def test_ppf_domain(self) -> None:
        with pytest.raises(ValueError):
            student_ppf(2.0, 1.0)
        with pytest.raises(ValueError):
            student_ppf(-1.0, 0.5)

    def test_pdf(self) -> None:
        assert student_pdf(3.0, 0.7) == pytest.approx(stats.t.pdf(0.7, 3.0), rel=1e-12)
