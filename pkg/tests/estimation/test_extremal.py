"""Tests for the joint (eta, ell) estimator."""

import math

import numpy as np
import pytest

from core.elliptical import EllipticalModel, mahalanobis_many
from core.errors import EstimationError
from core.families import Student
from core.types import ExtremalRegime, KernelKind
from estimation.extremal import (
    ExtremalEstimate,
    _ell_gamma_slope,
    classify_regime,
    ell_from_generator,
    estimate_ell,
    estimate_extremal,
    variance_v1,
    variance_v2,
)
from estimation.hill import HillConfig, tail_statistic
from estimation.kernel import KernelConfig, generator_prefactor, kernel_l2_norm

STUDENT_G = Student(2.0).generator_density(3, 1.0)


class TestEll:
    """Test ell(x) as a function of (gamma, g)."""

    def test_student_value(self) -> None:
        """Test ell(x) = 5.292757 for Student(2), N = 3, M(x) = 1."""
        assert STUDENT_G == pytest.approx(0.030629, rel=1e-4)
        assert ell_from_generator(0.5, STUDENT_G, 3) == pytest.approx(5.292757, rel=1e-6)

    def test_homogeneous_in_g(self) -> None:
        ell = estimate_ell(0.4, 0.02, 2)
        assert estimate_ell(0.4, 0.04, 2) == pytest.approx(ell / 2.0, rel=1e-13)

    def test_rejects_zero_generator(self) -> None:
        with pytest.raises(EstimationError, match="bandwidth"):
            estimate_ell(0.5, 0.0, 3)

    def test_rejects_non_positive_gamma(self) -> None:
        with pytest.raises(EstimationError):
            estimate_ell(-0.1, 0.1, 3)

    def test_gamma_slope_matches_finite_difference(self) -> None:
        step = 1e-6
        numeric = (
            ell_from_generator(0.5 + step, STUDENT_G, 3)
            - ell_from_generator(0.5 - step, STUDENT_G, 3)
        ) / (2.0 * step)
        assert _ell_gamma_slope(0.5, STUDENT_G, 3) == pytest.approx(numeric, rel=1e-6)


class TestVariances:
    """Test the regime variances V1 and V2."""

    @pytest.mark.parametrize(("gamma", "n_cov"), [(0.5, 3), (0.25, 1), (1.0, 5)])
    def test_v1_is_delta_method(self, gamma: float, n_cov: int) -> None:
        """Test V1 = gamma^2 (d ell / d gamma)^2, the delta method on sqrt(k)(gamma_hat - gamma)."""
        g = 0.05
        slope = _ell_gamma_slope(gamma, g, n_cov)
        assert variance_v1(gamma, g, n_cov) == pytest.approx(gamma**2 * slope**2, rel=1e-10)

    def test_v2_is_delta_method(self) -> None:
        """Test V2 = Var(g_hat) (ell / g)^2 with Var(g_hat) = prefactor g int K^2."""
        ell = ell_from_generator(0.5, STUDENT_G, 3)
        expected = (
            generator_prefactor(1.0, 3)
            * STUDENT_G
            * kernel_l2_norm(KernelKind.GAUSSIAN)
            * (ell / STUDENT_G) ** 2
        )
        assert variance_v2(0.5, STUDENT_G, 3, 1.0, KernelKind.GAUSSIAN) == pytest.approx(
            expected, rel=1e-10
        )

    def test_non_positive_inputs(self) -> None:
        with pytest.raises(EstimationError):
            variance_v1(0.5, 0.0, 3)
        with pytest.raises(EstimationError):
            variance_v2(0.5, 0.1, 3, 0.0, KernelKind.GAUSSIAN)


def test_classify_regime() -> None:
    assert classify_regime(100_000, 1_000, 0.1) is ExtremalRegime.KN_DOMINATES
    assert classify_regime(100_000, 1_000, 0.004) is ExtremalRegime.NHN_DOMINATES
    assert classify_regime(100_000, 1_000, 0.01) is ExtremalRegime.AMBIGUOUS


def _estimate(regime: ExtremalRegime) -> ExtremalEstimate:
    return ExtremalEstimate(
        gamma_hat=0.5,
        eta_hat=2.5,
        g_hat=0.03,
        ell_hat=5.3,
        var_eta=2.25,
        var_ell_regime1=16.0,
        var_ell_regime2=40.0,
        regime=regime,
        k=100,
        h=0.1,
        n=10_000,
        n_covariates=3,
        m_x=1.0,
    )


class TestExtremalEstimate:
    """Test standard errors and intervals."""

    def test_standard_errors_by_regime(self) -> None:
        assert _estimate(ExtremalRegime.KN_DOMINATES).se_ell == pytest.approx(0.4)
        assert _estimate(ExtremalRegime.NHN_DOMINATES).se_ell == pytest.approx(0.2)
        assert _estimate(ExtremalRegime.AMBIGUOUS).se_ell == pytest.approx(0.4)
        assert _estimate(ExtremalRegime.KN_DOMINATES).se_eta == pytest.approx(0.15)

    def test_intervals_are_symmetric(self) -> None:
        estimate = _estimate(ExtremalRegime.KN_DOMINATES)
        low, high = estimate.eta_interval(0.95)
        assert (low + high) / 2.0 == pytest.approx(2.5)
        assert high - low == pytest.approx(2 * 1.959964 * 0.15, rel=1e-6)

    def test_to_dict_fields(self) -> None:
        data = _estimate(ExtremalRegime.AMBIGUOUS).to_dict()
        assert set(data) == {
            "gamma_hat",
            "eta_hat",
            "g_hat",
            "ell_hat",
            "se_eta",
            "se_ell",
            "regime",
            "k",
            "h",
            "n",
        }
        assert data["regime"] == "ambiguous"


def test_estimate_extremal_on_student_sample(
    student_model: EllipticalModel, student_covariates: np.ndarray
) -> None:
    """Test (eta, ell) = (2.5, 5.29) at n = 10^5 with k = n^0.6 and h = n^-0.2."""
    n = student_covariates.shape[0]
    hill_config = HillConfig(k=1_000)
    estimate = estimate_extremal(
        tail_statistic(student_model, student_covariates, hill_config),
        mahalanobis_many(student_model, student_covariates),
        1.0,
        3,
        hill_config,
        KernelConfig(bandwidth=n**-0.2),
    )
    assert estimate.regime is ExtremalRegime.KN_DOMINATES
    assert estimate.eta_hat == pytest.approx(2.5, abs=0.2)
    assert estimate.ell_hat == pytest.approx(5.292757, rel=0.3)
    assert estimate.cov_eta_ell == pytest.approx(
        3 * estimate.gamma_hat**2 * _ell_gamma_slope(estimate.gamma_hat, estimate.g_hat, 3)
    )
    assert estimate.warnings == []
    assert math.isfinite(estimate.se_ell)
