"""Kernel estimate of the density generator c_N g_N at a Mahalanobis distance."""

import math
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field
from scipy.special import gammaln

from core.errors import DimensionError, EstimationError
from core.types import KernelKind

# grid points per chunk times sample size stays below this many kernel evaluations
_CHUNK_BUDGET = 4_000_000

# M(x) at or below this counts as the center of the law
ZERO_DISTANCE_ATOL = 1e-12

KernelFunction = Callable[[np.ndarray], np.ndarray]


def _gaussian(u: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)


def _epanechnikov(u: np.ndarray) -> np.ndarray:
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def _uniform(u: np.ndarray) -> np.ndarray:
    return np.where(np.abs(u) <= 1.0, 0.5, 0.0)


KERNELS: dict[KernelKind, KernelFunction] = {
    KernelKind.GAUSSIAN: _gaussian,
    KernelKind.EPANECHNIKOV: _epanechnikov,
    KernelKind.UNIFORM: _uniform,
}

# integral of K(u)^2 over the real line
_L2_NORMS: dict[KernelKind, float] = {
    KernelKind.GAUSSIAN: 1.0 / (2.0 * math.sqrt(math.pi)),
    KernelKind.EPANECHNIKOV: 0.6,
    KernelKind.UNIFORM: 0.5,
}


class KernelConfig(BaseModel):
    """Bandwidth h_n and kernel K of the generator estimate."""

    bandwidth: float = Field(gt=0, description="Bandwidth h_n")
    kernel: KernelKind = Field(default=KernelKind.GAUSSIAN, description="Smoothing kernel K")


def kernel_l2_norm(kind: KernelKind) -> float:
    """Return the integral of K^2, the constant entering the regime-2 variance."""
    return _L2_NORMS[kind]


def kernel_density(m_values: ArrayLike, points: ArrayLike, config: KernelConfig) -> np.ndarray:
    """Raw density estimate (1/(n h)) sum_i K((t - m_i)/h) of M(X) at each of ``points``."""
    sample = np.asarray(m_values, dtype=float).reshape(-1)
    if sample.size == 0:
        raise EstimationError("kernel density needs a non-empty sample")
    grid = np.atleast_1d(np.asarray(points, dtype=float))
    kernel = KERNELS[config.kernel]
    h = config.bandwidth
    chunk = max(1, _CHUNK_BUDGET // sample.size)
    density = np.empty(grid.size)
    for start in range(0, grid.size, chunk):
        block = grid[start : start + chunk]
        u = (block[:, None] - sample[None, :]) / h
        density[start : start + chunk] = kernel(u).sum(axis=1)
    return density / (sample.size * h)


def generator_prefactor(m_x: float, n_covariates: int) -> float:
    """M^{1 - N/2} Gamma(N/2) pi^{-N/2}, turning the density of M(X) into c_N g_N(M)."""
    if n_covariates < 1:
        raise DimensionError(f"covariate dimension must be at least 1, got {n_covariates}")
    if m_x < 0.0:
        raise EstimationError(f"Mahalanobis distance must be non-negative, got {m_x}")
    if m_x <= ZERO_DISTANCE_ATOL and n_covariates >= 3:
        raise EstimationError(
            f"M(x) = {m_x:.3g} is numerically zero; the prefactor M^(1 - N/2) is singular "
            f"for N = {n_covariates}, pick a point away from the center"
        )
    half = n_covariates / 2.0
    log_gamma = float(gammaln(half)) - half * math.log(math.pi)
    if m_x == 0.0:
        # N = 1 gives M^{1/2} = 0; N = 2 gives M^0 = 1
        return 0.0 if n_covariates == 1 else math.exp(log_gamma)
    return math.exp((1.0 - half) * math.log(m_x) + log_gamma)


def kernel_generator_estimate(
    m_values: ArrayLike, m_x: float, config: KernelConfig, n_covariates: int
) -> float:
    """g_hat: the kernel estimate of c_N g_N(M(x)) from the sample distances M(X_i).

    Args:
        m_values: Mahalanobis distances M(X_i) of the covariate sample.
        m_x: Mahalanobis distance of the conditioning point.
        config: Bandwidth and kernel.
        n_covariates: Covariate dimension N.

    Returns:
        A non-negative estimate; zero when no sample point lies in a compact window.

    Raises:
        EstimationError: On an empty sample or a singular prefactor.
    """
    prefactor = generator_prefactor(m_x, n_covariates)
    density = kernel_density(m_values, [m_x], config)
    return float(prefactor * density[0])
