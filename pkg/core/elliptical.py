"""Consistent elliptical models, conditional moments and Mahalanobis distances."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from core.errors import (
    DegenerateConditionalError,
    DimensionError,
    NotPositiveDefiniteError,
)
from core.families import Family

# sigma_cond^2 below this fraction of Sigma_Y is treated as a singular conditional law
DEGENERACY_RTOL = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class EllipticalModel:
    """A (xi, d)-elliptical law with location ``mu``, scale ``sigma`` and generator ``family``.

    ``family`` is None when only the first two moments are known (fitted data).
    The lower Cholesky factor of ``sigma`` is computed once at construction and
    serves as the canonical square root Lambda for every whitening step.
    """

    mu: np.ndarray
    sigma: np.ndarray
    family: Family | None = None
    cholesky: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=float).reshape(-1)
        sigma = np.array(self.sigma, dtype=float)
        if sigma.shape != (mu.size, mu.size):
            raise DimensionError(
                f"sigma must be {mu.size}x{mu.size} to match mu, got shape {sigma.shape}"
            )
        if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-14):
            raise NotPositiveDefiniteError("sigma must be symmetric")
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError("sigma is not positive definite (Cholesky failed)")
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "sigma", _frozen(sigma))
        object.__setattr__(self, "cholesky", _frozen(chol))

    @property
    def dim(self) -> int:
        return int(self.mu.size)

    def marginal(self, dims: int) -> "EllipticalModel":
        """Law of the leading ``dims`` coordinates (same generator by Kano consistency)."""
        if not 1 <= dims <= self.dim:
            raise DimensionError(f"marginal dimension must lie in [1, {self.dim}], got {dims}")
        return EllipticalModel(
            mu=self.mu[:dims].copy(), sigma=self.sigma[:dims, :dims].copy(), family=self.family
        )

    def split(self, n_covariates: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
        """(mu_X, Sigma_X, Sigma_XY, mu_Y, Sigma_Y) for the last coordinate as the response."""
        if self.dim != n_covariates + 1:
            raise DimensionError(
                f"joint model must have dimension N + 1 = {n_covariates + 1}, got {self.dim}"
            )
        n = n_covariates
        return (
            self.mu[:n],
            self.sigma[:n, :n],
            self.sigma[:n, n],
            float(self.mu[n]),
            float(self.sigma[n, n]),
        )

    def to_dict(self) -> dict[str, object]:
        return {
            **(self.family.to_dict() if self.family is not None else {}),
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
        }


@dataclass(frozen=True)
class ConditionalMoments:
    """Location and scale of Y | X = x, with the Mahalanobis distance of x."""

    mu_cond: float
    sigma_cond: float
    m_x: float

    def __post_init__(self) -> None:
        if not self.sigma_cond > 0.0:
            raise DegenerateConditionalError(f"sigma_cond must be positive, got {self.sigma_cond}")
        if self.m_x < 0.0:
            raise ValueError(f"Mahalanobis distance must be non-negative, got {self.m_x}")


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """Immutable n x d matrix of i.i.d. draws (rows are observations)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=float)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2:
            raise DimensionError(f"sample must be a 2-D matrix, got {data.ndim} dimensions")
        if data.shape[0] < 2 or data.shape[1] < 1:
            raise DimensionError(
                f"sample needs n >= 2 rows and at least 1 column, got {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("sample contains missing or non-finite entries")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    def covariates(self, n_covariates: int) -> np.ndarray:
        """Leading ``n_covariates`` columns (the X block)."""
        if not 1 <= n_covariates <= self.dim:
            raise DimensionError(
                f"covariate count must lie in [1, {self.dim}], got {n_covariates}"
            )
        return self.data[:, :n_covariates]

    def write_csv(self, path: str | Path) -> None:
        """Write as headerless CSV with 17 significant digits (exact float round-trip)."""
        np.savetxt(path, self.data, fmt="%.17g", delimiter=",")

    @classmethod
    def read_csv(cls, path: str | Path) -> "SampleMatrix":
        return cls(np.loadtxt(path, delimiter=",", ndmin=2))


def _x_block(model: EllipticalModel, n_covariates: int) -> tuple[np.ndarray, np.ndarray]:
    """Location and Cholesky factor of the covariate block matching ``n_covariates``."""
    if model.dim == n_covariates:
        return model.mu, model.cholesky
    if model.dim == n_covariates + 1:
        # the leading block of a lower Cholesky factor factors the leading block of sigma
        return model.mu[:n_covariates], model.cholesky[:n_covariates, :n_covariates]
    raise DimensionError(
        f"covariate point has {n_covariates} entries but the model has dimension {model.dim}"
    )


def mahalanobis(model: EllipticalModel, x: np.ndarray) -> float:
    """M(x) = (x - mu_X)^T Sigma_X^{-1} (x - mu_X).

    ``model`` may be the covariate law itself or the joint law of (X, Y); in the
    latter case its leading block is used.
    """
    point = np.asarray(x, dtype=float).reshape(-1)
    mu_x, chol = _x_block(model, point.size)
    z = solve_triangular(chol, point - mu_x, lower=True)
    return float(z @ z)


def whitened(model: EllipticalModel, data: np.ndarray) -> np.ndarray:
    """Rows of Lambda_X^{-1}(X_i - mu_X) for a block of covariate draws."""
    rows = np.atleast_2d(np.asarray(data, dtype=float))
    mu_x, chol = _x_block(model, rows.shape[1])
    return solve_triangular(chol, (rows - mu_x).T, lower=True).T


def whiten(model: EllipticalModel, data: np.ndarray, index: int = 0) -> np.ndarray:
    """Component ``index`` of the whitened covariates, the default Hill statistic W."""
    z = whitened(model, data)
    if not 0 <= index < z.shape[1]:
        raise DimensionError(f"component index must lie in [0, {z.shape[1] - 1}], got {index}")
    return np.ascontiguousarray(z[:, index])


def mahalanobis_many(model: EllipticalModel, data: np.ndarray) -> np.ndarray:
    """M(X_i) for every row of ``data``."""
    z = whitened(model, data)
    return np.einsum("ij,ij->i", z, z)


def mahalanobis_norm(model: EllipticalModel, data: np.ndarray) -> np.ndarray:
    """sqrt(M(X_i)), the Hill statistic that uses every covariate."""
    return np.sqrt(mahalanobis_many(model, data))


def conditional_moments(model: EllipticalModel, x: np.ndarray) -> ConditionalMoments:
    """Location, scale and Mahalanobis distance of Y | X = x for the joint law of (X, Y)."""
    point = np.asarray(x, dtype=float).reshape(-1)
    n_cov = point.size
    mu_x, _, sigma_xy, mu_y, sigma_y = model.split(n_cov)
    chol_x = model.cholesky[:n_cov, :n_cov]
    beta = cho_solve((chol_x, True), sigma_xy)
    mu_cond = float(mu_y + beta @ (point - mu_x))
    var_cond = sigma_y - float(sigma_xy @ beta)
    if var_cond <= DEGENERACY_RTOL * sigma_y:
        raise DegenerateConditionalError(
            f"conditional variance {var_cond:.3e} is degenerate relative to Sigma_Y = {sigma_y:.3e}"
        )
    return ConditionalMoments(
        mu_cond=mu_cond,
        sigma_cond=float(np.sqrt(var_cond)),
        m_x=mahalanobis(model, point),
    )
