"""Joint estimation of (eta, ell(x)) with their asymptotic variances."""

import math
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field
from scipy.special import digamma, gammaln
from scipy.stats import norm

from core.errors import EstimationError
from core.types import ExtremalRegime, KernelKind
from estimation.hill import HillConfig, estimate_eta
from estimation.kernel import (
    KernelConfig,
    generator_prefactor,
    kernel_generator_estimate,
    kernel_l2_norm,
)

logger = structlog.get_logger(__name__)

# n h / k within this factor of one is reported as ambiguous
REGIME_MARGIN = 2.0


def _log_gamma_ratio(gamma: float, n_covariates: int) -> float:
    """ln[Gamma((N + 1/gamma + 1)/2) / Gamma((1/gamma + 1)/2)]."""
    u = 1.0 / gamma
    return float(gammaln((n_covariates + u + 1.0) / 2.0) - gammaln((u + 1.0) / 2.0))


def ell_from_generator(gamma: float, g: float, n_covariates: int) -> float:
    """ell(x) as a function of the tail index and the generator value c_N g_N(M(x))."""
    u = 1.0 / gamma
    log_value = (
        _log_gamma_ratio(gamma, n_covariates)
        + math.log(u)
        - 0.5 * n_covariates * math.log(math.pi)
        - math.log(n_covariates + u)
        - math.log(g)
    )
    return math.exp(log_value)


def estimate_ell(gamma_hat: float, g_hat: float, n_covariates: int) -> float:
    """Plug-in ell_hat(x); homogeneous of degree -1 in ``g_hat``."""
    if not gamma_hat > 0.0:
        raise EstimationError(f"gamma_hat must be positive, got {gamma_hat}")
    if not g_hat > 0.0:
        raise EstimationError(
            f"g_hat must be positive, got {g_hat}; widen the bandwidth or use a Gaussian kernel"
        )
    return ell_from_generator(gamma_hat, g_hat, n_covariates)


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0.0:
            raise EstimationError(f"{name} must be positive, got {value}")


def variance_v1(gamma: float, g: float, n_covariates: int) -> float:
    """Asymptotic variance of sqrt(k)(ell_hat - ell) when k_n = o(n h_n)."""
    _check_positive(gamma=gamma, g=g)
    u = 1.0 / gamma
    ratio = math.exp(_log_gamma_ratio(gamma, n_covariates))
    bracket = (digamma((u + 1.0) / 2.0) - digamma((n_covariates + u + 1.0) / 2.0)) / (
        2.0 * gamma**2 * (n_covariates * gamma + 1.0)
    ) - n_covariates / (n_covariates * gamma + 1.0) ** 2
    return float(math.pi ** (-n_covariates) * gamma**2 / g**2 * ratio**2 * bracket**2)


def variance_v2(
    gamma: float, g: float, n_covariates: int, m_x: float, kernel: KernelKind
) -> float:
    """Asymptotic variance of sqrt(n h)(ell_hat - ell) when n h_n = o(k_n)."""
    _check_positive(gamma=gamma, g=g, m_x=m_x)
    # Var(g_hat) = prefactor^2 f_M int K^2 with f_M = g / prefactor
    prefactor = generator_prefactor(m_x, n_covariates)
    u = 1.0 / gamma
    ratio = math.exp(_log_gamma_ratio(gamma, n_covariates))
    slope = ratio * u * math.pi ** (-n_covariates / 2.0) / ((n_covariates + u) * g**2)
    return float(prefactor * g * kernel_l2_norm(kernel) * slope**2)


def classify_regime(n: int, k: int, bandwidth: float) -> ExtremalRegime:
    """Compare n h_n with k_n: the slower of the two rates drives ell_hat."""
    ratio = n * bandwidth / k
    if ratio > REGIME_MARGIN:
        return ExtremalRegime.KN_DOMINATES
    if ratio < 1.0 / REGIME_MARGIN:
        return ExtremalRegime.NHN_DOMINATES
    return ExtremalRegime.AMBIGUOUS


class ExtremalEstimate(BaseModel):
    """Estimates of gamma, eta, c_N g_N(M(x)) and ell(x) at one conditioning point."""

    gamma_hat: float = Field(gt=0, description="Hill estimate of the tail index")
    eta_hat: float = Field(description="N * gamma_hat + 1")
    g_hat: float = Field(gt=0, description="Kernel estimate of c_N g_N(M(x))")
    ell_hat: float = Field(gt=0, description="Estimate of ell(x)")
    var_eta: float = Field(ge=0, description="N^2 gamma^2")
    var_ell_regime1: float = Field(ge=0, description="V1, rate sqrt(k_n)")
    var_ell_regime2: float = Field(ge=0, description="V2, rate sqrt(n h_n)")
    cov_eta_ell: float = Field(default=0.0, description="Asymptotic covariance in regime 1")
    regime: ExtremalRegime
    k: int = Field(ge=1)
    h: float = Field(gt=0)
    n: int = Field(ge=2)
    n_covariates: int = Field(ge=1)
    m_x: float = Field(ge=0)
    warnings: list[str] = Field(default_factory=list)

    @property
    def se_eta(self) -> float:
        return math.sqrt(self.var_eta / self.k)

    @property
    def se_ell(self) -> float:
        """Standard error of ell_hat; the larger of the two when the regime is ambiguous."""
        se1 = math.sqrt(self.var_ell_regime1 / self.k)
        se2 = math.sqrt(self.var_ell_regime2 / (self.n * self.h))
        if self.regime is ExtremalRegime.KN_DOMINATES:
            return se1
        if self.regime is ExtremalRegime.NHN_DOMINATES:
            return se2
        return max(se1, se2)

    def eta_interval(self, confidence: float = 0.95) -> tuple[float, float]:
        z = float(norm.ppf(0.5 + confidence / 2.0))
        return self.eta_hat - z * self.se_eta, self.eta_hat + z * self.se_eta

    def ell_interval(self, confidence: float = 0.95) -> tuple[float, float]:
        z = float(norm.ppf(0.5 + confidence / 2.0))
        return self.ell_hat - z * self.se_ell, self.ell_hat + z * self.se_ell

    def to_dict(self) -> dict[str, Any]:
        """JSON view with the standard errors in place of the raw variances."""
        return {
            "gamma_hat": self.gamma_hat,
            "eta_hat": self.eta_hat,
            "g_hat": self.g_hat,
            "ell_hat": self.ell_hat,
            "se_eta": self.se_eta,
            "se_ell": self.se_ell,
            "regime": self.regime.value,
            "k": self.k,
            "h": self.h,
            "n": self.n,
        }


def estimate_extremal(
    w: ArrayLike,
    m_values: ArrayLike,
    m_x: float,
    n_covariates: int,
    hill_config: HillConfig,
    kernel_config: KernelConfig,
) -> ExtremalEstimate:
    """Run the Hill and kernel steps and assemble an :class:`ExtremalEstimate`.

    Args:
        w: Tail statistic W of the covariate sample.
        m_values: Mahalanobis distances M(X_i) of the same sample.
        m_x: Mahalanobis distance of the conditioning point.
        n_covariates: Covariate dimension N.
        hill_config: k_n and the statistic choice.
        kernel_config: h_n and the kernel.

    Returns:
        The joint estimate with both regime variances and the selected regime.
    """
    distances = np.asarray(m_values, dtype=float).reshape(-1)
    n = distances.size
    eta = estimate_eta(w, hill_config, n_covariates)
    if not eta.gamma > 0.0:
        raise EstimationError(f"Hill estimate must be positive, got {eta.gamma}")
    g_hat = kernel_generator_estimate(distances, m_x, kernel_config, n_covariates)
    ell_hat = estimate_ell(eta.gamma, g_hat, n_covariates)
    h = kernel_config.bandwidth
    regime = classify_regime(n, hill_config.k, h)

    v1 = variance_v1(eta.gamma, g_hat, n_covariates)
    v2 = variance_v2(eta.gamma, g_hat, n_covariates, m_x, kernel_config.kernel)
    # both estimates are driven by gamma_hat when k_n governs the limit
    cov = 0.0
    if regime is not ExtremalRegime.NHN_DOMINATES:
        slope = _ell_gamma_slope(eta.gamma, g_hat, n_covariates)
        cov = n_covariates * eta.gamma**2 * slope

    warnings: list[str] = []
    if regime is ExtremalRegime.AMBIGUOUS:
        warnings.append(
            f"n h_n / k_n = {n * h / hill_config.k:.3g} is close to 1; "
            "both variances reported, the larger drives the interval"
        )
    logger.debug(
        "extremal_estimated",
        gamma_hat=eta.gamma,
        g_hat=g_hat,
        ell_hat=ell_hat,
        regime=regime.value,
    )
    return ExtremalEstimate(
        gamma_hat=eta.gamma,
        eta_hat=eta.eta,
        g_hat=g_hat,
        ell_hat=ell_hat,
        var_eta=(n_covariates * eta.gamma) ** 2,
        var_ell_regime1=v1,
        var_ell_regime2=v2,
        cov_eta_ell=cov,
        regime=regime,
        k=hill_config.k,
        h=h,
        n=n,
        n_covariates=n_covariates,
        m_x=m_x,
        warnings=warnings,
    )


def _ell_gamma_slope(gamma: float, g: float, n_covariates: int) -> float:
    """d ell / d gamma at fixed g."""
    u = 1.0 / gamma
    spread = digamma((n_covariates + u + 1.0) / 2.0) - digamma((u + 1.0) / 2.0)
    ell = ell_from_generator(gamma, g, n_covariates)
    return float(-ell * u * u * (spread / 2.0 + n_covariates / (u * (n_covariates + u))))
