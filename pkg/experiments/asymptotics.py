"""Limiting variances of the standardized quantile errors."""

from core.errors import EstimationError
from estimation.schedule import SequenceSchedule


def intermediate_variance(gamma: float, n_covariates: int) -> float:
    """N^2 gamma^4 / (gamma N + 1)^4, under the rate sqrt(k_n) / ln(1 - alpha_n)."""
    return n_covariates**2 * gamma**4 / (gamma * n_covariates + 1.0) ** 4


def high_variance(gamma: float, n_covariates: int, theta: float) -> float:
    """(gamma / (gamma N + 1) - theta N gamma^2 / (gamma N + 1)^2)^2."""
    scale = gamma * n_covariates + 1.0
    return (gamma / scale - theta * n_covariates * gamma**2 / scale**2) ** 2


def asymptotic_variance_table(
    schedule: SequenceSchedule, gamma: float, n_covariates: int
) -> tuple[float, float]:
    """(intermediate variance, high variance) for one schedule.

    Raises:
        EstimationError: When a + b = 1 leaves theta undefined.
    """
    theta = schedule.theta()
    if theta is None:
        raise EstimationError(f"theta is undefined for a + b = {schedule.a + schedule.b}")
    return intermediate_variance(gamma, n_covariates), high_variance(gamma, n_covariates, theta)
