"""Special-function helpers built on ``scipy.special``.

The Student distribution function and its inverse go through the regularized
incomplete beta function so that both tails keep full relative precision.
"""

import math

import numpy as np
from scipy.special import betainc, betaincinv, gammainc, gammaln


def gamma_ratio(a: float, b: float) -> float:
    """Return Gamma(a) / Gamma(b) computed on the log scale."""
    return math.exp(float(gammaln(a) - gammaln(b)))


def chi2_cdf(dof: float, t: float) -> float:
    """Distribution function of a chi-square law with ``dof`` degrees of freedom."""
    if t <= 0.0:
        return 0.0
    return float(gammainc(dof / 2.0, t / 2.0))


def student_sf(nu: float, t: float) -> float:
    """Survival function P(T > t) of a standard Student law with ``nu`` degrees of freedom."""
    if nu <= 0.0:
        raise ValueError(f"Student degrees of freedom must be positive, got {nu}")
    half_tail = 0.5 * float(betainc(nu / 2.0, 0.5, nu / (nu + t * t)))
    return half_tail if t >= 0.0 else 1.0 - half_tail


def student_cdf(nu: float, t: float) -> float:
    """Distribution function of a standard Student law with ``nu`` degrees of freedom."""
    if nu <= 0.0:
        raise ValueError(f"Student degrees of freedom must be positive, got {nu}")
    half_tail = 0.5 * float(betainc(nu / 2.0, 0.5, nu / (nu + t * t)))
    return 1.0 - half_tail if t >= 0.0 else half_tail


def student_ppf(nu: float, alpha: float) -> float:
    """Inverse distribution function of a standard Student law.

    Solves I_x(nu/2, 1/2) = 2 min(alpha, 1 - alpha) for x = nu / (nu + t^2). Near
    the median the complementary beta variable 1 - x is inverted instead, which
    keeps t accurate when it is close to zero.
    """
    if nu <= 0.0:
        raise ValueError(f"Student degrees of freedom must be positive, got {nu}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    tail = min(alpha, 1.0 - alpha)
    if 2.0 * tail > 0.5:
        y = float(betaincinv(0.5, nu / 2.0, 1.0 - 2.0 * tail))
        t = math.sqrt(nu * y / (1.0 - y)) if y < 1.0 else math.inf
    else:
        x = float(betaincinv(nu / 2.0, 0.5, 2.0 * tail))
        t = math.sqrt(nu * (1.0 - x) / x) if x > 0.0 else math.inf
    return t if alpha >= 0.5 else -t


def student_pdf(nu: float, t: float | np.ndarray) -> float | np.ndarray:
    """Density of a standard Student law with ``nu`` degrees of freedom."""
    log_norm = gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0) - 0.5 * math.log(nu * math.pi)
    return np.exp(log_norm - (nu + 1.0) / 2.0 * np.log1p(np.square(t) / nu))
