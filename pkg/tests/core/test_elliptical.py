"""Tests for elliptical models, Mahalanobis distances and conditional moments."""

import math
from pathlib import Path

import numpy as np
import pytest

from core.elliptical import (
    ConditionalMoments,
    EllipticalModel,
    SampleMatrix,
    conditional_moments,
    mahalanobis,
    mahalanobis_many,
    mahalanobis_norm,
    whiten,
    whitened,
)
from core.errors import (
    DegenerateConditionalError,
    DimensionError,
    NotPositiveDefiniteError,
)
from core.families import Gaussian, Student
from core.sampling import sample


@pytest.fixture
def student_identity() -> EllipticalModel:
    return EllipticalModel(mu=np.zeros(4), sigma=np.eye(4), family=Student(2.0))


class TestEllipticalModel:
    """Test model construction and validation."""

    def test_arrays_are_frozen(self, student_identity: EllipticalModel) -> None:
        """Test that location and scale cannot be mutated after construction."""
        with pytest.raises(ValueError):
            student_identity.mu[0] = 1.0
        assert student_identity.dim == 4

    def test_cholesky_factors_sigma(self) -> None:
        """Test that the stored factor reproduces sigma."""
        sigma = np.array([[2.0, 0.3], [0.3, 1.0]])
        model = EllipticalModel(mu=[0.0, 0.0], sigma=sigma)
        np.testing.assert_allclose(model.cholesky @ model.cholesky.T, sigma, rtol=1e-14)
        assert model.family is None

    def test_rejects_indefinite_sigma(self) -> None:
        """Test that a non positive definite scale is rejected."""
        with pytest.raises(NotPositiveDefiniteError):
            EllipticalModel(mu=[0.0, 0.0], sigma=[[1.0, 2.0], [2.0, 1.0]])

    def test_rejects_asymmetric_sigma(self) -> None:
        with pytest.raises(NotPositiveDefiniteError):
            EllipticalModel(mu=[0.0, 0.0], sigma=[[1.0, 0.5], [0.0, 1.0]])

    def test_rejects_shape_mismatch(self) -> None:
        with pytest.raises(DimensionError):
            EllipticalModel(mu=[0.0, 0.0, 0.0], sigma=np.eye(2))

    def test_marginal_keeps_family(self, student_identity: EllipticalModel) -> None:
        """Test that marginals of a consistent family keep the generator."""
        marginal = student_identity.marginal(3)
        assert marginal.dim == 3
        assert marginal.family == Student(2.0)

    def test_split_blocks(self) -> None:
        sigma = np.array([[1.0, 0.2, 0.5], [0.2, 1.0, 0.1], [0.5, 0.1, 2.0]])
        model = EllipticalModel(mu=[1.0, 2.0, 3.0], sigma=sigma)
        mu_x, sigma_x, sigma_xy, mu_y, sigma_y = model.split(2)
        np.testing.assert_array_equal(mu_x, [1.0, 2.0])
        np.testing.assert_array_equal(sigma_x, sigma[:2, :2])
        np.testing.assert_array_equal(sigma_xy, [0.5, 0.1])
        assert mu_y == 3.0
        assert sigma_y == 2.0

    def test_split_dimension_mismatch(self, student_identity: EllipticalModel) -> None:
        with pytest.raises(DimensionError):
            student_identity.split(2)

    def test_to_dict(self, student_identity: EllipticalModel) -> None:
        data = student_identity.to_dict()
        assert data["family"] == "student"
        assert data["nu"] == 2.0
        assert data["mu"] == [0.0, 0.0, 0.0, 0.0]


class TestMahalanobis:
    """Test Mahalanobis distances and whitening."""

    def test_identity_scale(self, student_identity: EllipticalModel) -> None:
        """Test that the joint model's leading block is used for covariate points."""
        assert mahalanobis(student_identity, np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)
        assert mahalanobis(student_identity, np.array([1.0, 2.0, 2.0, 0.0])) == pytest.approx(9.0)

    def test_correlated_scale(self) -> None:
        sigma = np.array([[1.0, 0.5], [0.5, 1.0]])
        model = EllipticalModel(mu=[0.0, 0.0], sigma=sigma)
        x = np.array([1.0, -1.0])
        expected = float(x @ np.linalg.solve(sigma, x))
        assert mahalanobis(model, x) == pytest.approx(expected, rel=1e-12)

    def test_point_dimension_checked(self, student_identity: EllipticalModel) -> None:
        with pytest.raises(DimensionError):
            mahalanobis(student_identity, np.array([1.0, 0.0]))

    def test_many_matches_single(self) -> None:
        sigma = np.array([[2.0, 0.4, 0.1], [0.4, 1.0, 0.2], [0.1, 0.2, 0.5]])
        model = EllipticalModel(mu=[0.1, -0.2, 0.3], sigma=sigma)
        rows = np.random.default_rng(3).normal(size=(5, 3))
        many = mahalanobis_many(model, rows)
        for row, value in zip(rows, many, strict=True):
            assert value == pytest.approx(mahalanobis(model, row), rel=1e-12)
        np.testing.assert_allclose(mahalanobis_norm(model, rows), np.sqrt(many))

    def test_whiten_component(self) -> None:
        model = EllipticalModel(mu=[1.0, 1.0], sigma=[[4.0, 0.0], [0.0, 9.0]])
        w = whiten(model, np.array([[3.0, 4.0], [1.0, 1.0]]), index=1)
        np.testing.assert_allclose(w, [1.0, 0.0])

    def test_whiten_index_out_of_range(self) -> None:
        model = EllipticalModel(mu=[0.0], sigma=[[1.0]])
        with pytest.raises(DimensionError):
            whiten(model, np.array([[1.0], [2.0]]), index=1)

    def test_whitened_sample_has_identity_covariance(self) -> None:
        sigma = np.array([[2.0, 0.8, -0.3], [0.8, 1.5, 0.4], [-0.3, 0.4, 1.0]])
        model = EllipticalModel(mu=[1.0, -2.0, 0.5], sigma=sigma, family=Gaussian())
        z = whitened(model, sample(model, 200_000, seed=21).data)
        np.testing.assert_allclose(np.cov(z, rowvar=False), np.eye(3), atol=0.02)

    def test_reflection_through_location(self) -> None:
        """Test M(x) = M(2 mu - x)."""
        sigma = np.array([[2.0, 0.4, 0.1], [0.4, 1.0, 0.2], [0.1, 0.2, 0.5]])
        model = EllipticalModel(mu=[0.1, -0.2, 0.3], sigma=sigma)
        for x in np.random.default_rng(6).normal(size=(5, 3)):
            reflected = 2.0 * model.mu - x
            assert mahalanobis(model, reflected) == pytest.approx(mahalanobis(model, x), rel=1e-12)


class TestConditionalMoments:
    """Test the location and scale of Y given X = x."""

    def test_independent_blocks(self, student_identity: EllipticalModel) -> None:
        cond = conditional_moments(student_identity, np.array([1.0, 0.0, 0.0]))
        assert cond.mu_cond == pytest.approx(0.0)
        assert cond.sigma_cond == pytest.approx(1.0)
        assert cond.m_x == pytest.approx(1.0)

    def test_bivariate_regression(self) -> None:
        """Test mu + rho x and sqrt(1 - rho^2) for a standard bivariate law."""
        model = EllipticalModel(mu=[0.0, 0.0], sigma=[[1.0, 0.5], [0.5, 1.0]])
        cond = conditional_moments(model, np.array([1.0]))
        assert cond.mu_cond == pytest.approx(0.5)
        assert cond.sigma_cond == pytest.approx(math.sqrt(0.75))
        assert cond.m_x == pytest.approx(1.0)

    def test_degenerate_scale_rejected(self) -> None:
        with pytest.raises(DegenerateConditionalError):
            ConditionalMoments(mu_cond=0.0, sigma_cond=0.0, m_x=1.0)

    def test_nearly_collinear_response_rejected(self) -> None:
        """Test that a response almost determined by X is reported as degenerate."""
        eps = 1e-14
        sigma = np.array([[1.0, 1.0 - eps], [1.0 - eps, 1.0]])
        model = EllipticalModel(mu=[0.0, 0.0], sigma=sigma)
        with pytest.raises(DegenerateConditionalError):
            conditional_moments(model, np.array([0.5]))

    @pytest.mark.parametrize("scale", [-2.0, 3.0])
    def test_affine_equivariance(self, scale: float) -> None:
        """Test (s mu + t, s^2 Sigma): location moves with s, scale with |s|, M is unchanged."""
        sigma = np.array([[2.0, 0.4, 0.6], [0.4, 1.0, 0.3], [0.6, 0.3, 1.5]])
        mu = np.array([0.5, -1.0, 2.0])
        shift = np.array([1.0, 4.0, -3.0])
        x = np.array([1.2, 0.7])
        base = conditional_moments(EllipticalModel(mu=mu, sigma=sigma), x)
        moved_model = EllipticalModel(mu=scale * mu + shift, sigma=scale**2 * sigma)
        moved = conditional_moments(moved_model, scale * x + shift[:2])
        assert moved.mu_cond == pytest.approx(scale * base.mu_cond + shift[2], rel=1e-12)
        assert moved.sigma_cond == pytest.approx(abs(scale) * base.sigma_cond, rel=1e-12)
        assert moved.m_x == pytest.approx(base.m_x, rel=1e-12)


class TestSampleMatrix:
    """Test the sample container."""

    def test_csv_round_trip_is_exact(self, tmp_path: Path) -> None:
        data = np.random.default_rng(0).standard_t(2.0, size=(20, 3))
        path = tmp_path / "sample.csv"
        SampleMatrix(data).write_csv(path)
        loaded = SampleMatrix.read_csv(path)
        np.testing.assert_array_equal(loaded.data, data)

    def test_rejects_non_finite(self) -> None:
        with pytest.raises(ValueError):
            SampleMatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_rejects_single_row(self) -> None:
        with pytest.raises(DimensionError):
            SampleMatrix(np.array([[1.0, 2.0]]))

    def test_covariates(self) -> None:
        sample = SampleMatrix(np.arange(12.0).reshape(4, 3))
        assert sample.covariates(2).shape == (4, 2)
        with pytest.raises(DimensionError):
            sample.covariates(4)
