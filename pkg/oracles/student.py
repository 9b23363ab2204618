"""Closed-form conditional law of Y given X = x under a Student elliptical model."""

import math
from dataclasses import dataclass

from core.special import gamma_ratio, student_cdf, student_pdf, student_ppf

# Unconditional Student (nu = 2) quantile reported by a linear quantile-regression
# baseline at the extreme level of the real-data study; kept for comparison output.
QUANTILE_REGRESSION_ANCHOR = 1530.15


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class StudentConditionalLaw:
    """Scaled Student law with nu + N degrees of freedom.

    Scale is sigma_cond * sqrt((nu + M(x)) / (nu + N)), location mu_cond.
    """

    nu: float
    n_covariates: int
    m_x: float
    mu_cond: float = 0.0
    sigma_cond: float = 1.0

    def __post_init__(self) -> None:
        if not self.nu > 0.0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.n_covariates < 0:
            raise ValueError(f"covariate dimension must be non-negative, got {self.n_covariates}")
        if self.m_x < 0.0:
            raise ValueError(f"Mahalanobis distance must be non-negative, got {self.m_x}")
        if not self.sigma_cond > 0.0:
            raise ValueError(f"sigma_cond must be positive, got {self.sigma_cond}")

    @property
    def dof(self) -> float:
        return self.nu + self.n_covariates

    @property
    def scale(self) -> float:
        return self.sigma_cond * math.sqrt((self.nu + self.m_x) / self.dof)

    @property
    def tail_index(self) -> float:
        return 1.0 / self.dof

    def pdf(self, y: float) -> float:
        return float(student_pdf(self.dof, (y - self.mu_cond) / self.scale)) / self.scale

    def cdf(self, y: float) -> float:
        return student_cdf(self.dof, (y - self.mu_cond) / self.scale)

    def ppf(self, alpha: float) -> float:
        return self.mu_cond + self.scale * student_ppf(self.dof, alpha)

    def tvar(self, alpha: float) -> float:
        """E[Y | Y > q_alpha] for the conditional law."""
        _check_alpha(alpha)
        m = self.dof
        if not m > 1.0:
            raise ValueError(f"TVaR needs nu + N > 1, got {m}")
        t = student_ppf(m, alpha)
        standard = (
            gamma_ratio((m + 1.0) / 2.0, m / 2.0)
            * math.sqrt(m)
            / (math.sqrt(math.pi) * (m - 1.0))
            * (1.0 + t * t / m) ** ((1.0 - m) / 2.0)
            / (1.0 - alpha)
        )
        return self.mu_cond + self.scale * standard


def student_conditional_quantile(nu: float, n_covariates: int, m_x: float, alpha: float) -> float:
    """sqrt((nu + M) / (nu + N)) times the (nu + N)-df Student quantile at ``alpha``."""
    _check_alpha(alpha)
    return StudentConditionalLaw(nu, n_covariates, m_x).ppf(alpha)


def student_conditional_tvar(nu: float, n_covariates: int, m_x: float, alpha: float) -> float:
    """Tail value at risk of the standardized conditional law (mu = 0, sigma = 1)."""
    return StudentConditionalLaw(nu, n_covariates, m_x).tvar(alpha)


def anchor_level(nu: float = 2.0, value: float = QUANTILE_REGRESSION_ANCHOR) -> float:
    """Level alpha at which the nu-df Student quantile equals ``value``."""
    return student_cdf(nu, value)
