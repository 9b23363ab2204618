"""Lp-quantile and Haezendonck-Goovaerts estimates obtained from quantile estimates."""

import math
from dataclasses import dataclass

from scipy.special import betaln

from core.elliptical import ConditionalMoments
from core.errors import ExistenceError
from core.types import MeasureKind
from estimation.extremal import ExtremalEstimate
from estimation.quantiles import RiskEstimate, build_estimate


def conditional_tail_index(gamma: float, n_covariates: int) -> float:
    """Tail index (1/gamma + N)^{-1} of Y given X = x."""
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 1.0 / (1.0 / gamma + n_covariates)


def _check_p(p: float) -> None:
    if p < 1.0:
        raise ValueError(f"p must be at least 1, got {p}")


def f_L(gamma: float, p: float) -> float:  # noqa: N802
    """Lp-quantile to quantile ratio [gamma / B(p, 1/gamma - p + 1)]^{-gamma}."""
    _check_p(p)
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if p == 1.0:
        return 1.0
    if not gamma * (p - 1.0) < 1.0:
        raise ExistenceError(f"f_L needs gamma < 1/(p - 1) = {1.0 / (p - 1.0):.6g}, got {gamma}")
    log_beta = float(betaln(p, 1.0 / gamma - p + 1.0))
    return math.exp(-gamma * (math.log(gamma) - log_beta))


def f_H(gamma: float, p: float) -> float:  # noqa: N802
    """Asymptotic ratio between the HG risk measure with phi(t) = t^p and the quantile."""
    _check_p(p)
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not gamma * p < 1.0:
        raise ExistenceError(f"f_H needs gamma < 1/p = {1.0 / p:.6g}, got {gamma}")
    if p == 1.0:
        return 1.0 / (1.0 - gamma)
    u = 1.0 / gamma
    log_value = (
        math.log(u)
        + (p * gamma - 1.0) * math.log(u - p)
        - gamma * (p - 1.0) * math.log(p)
        + gamma * float(betaln(u - p, p))
    )
    return math.exp(log_value)


@dataclass(frozen=True)
class ConversionFactor:
    """f_L or f_H evaluated at the conditional tail index."""

    kind: MeasureKind
    p: float
    gamma_cond: float
    value: float


def conversion_factor(
    kind: MeasureKind, gamma_hat: float, n_covariates: int, p: float
) -> ConversionFactor:
    """Factor applied to the radial term, after the existence guard p <= N or gamma < 1/(p - N).

    Raises:
        ExistenceError: When the conditional law has no moment of the needed order.
    """
    _check_p(p)
    gamma_cond = conditional_tail_index(gamma_hat, n_covariates)
    if not gamma_cond * p < 1.0:
        bound = "none" if p <= n_covariates else f"{1.0 / (p - n_covariates):.6g}"
        raise ExistenceError(
            f"{kind.value}:{p:g} does not exist: conditional tail index {gamma_cond:.6g} "
            f"needs to be below 1/p = {1.0 / p:.6g} (gamma_hat = {gamma_hat:.6g}, "
            f"bound on gamma_hat {bound})"
        )
    if kind is MeasureKind.LP_QUANTILE:
        value = f_L(gamma_cond, p)
    elif kind is MeasureKind.HAEZENDONCK_GOOVAERTS:
        value = f_H(gamma_cond, p)
    else:
        raise ValueError(f"no conversion factor for {kind.value}")
    return ConversionFactor(kind=kind, p=p, gamma_cond=gamma_cond, value=value)


def _convert(
    base: RiskEstimate, est: ExtremalEstimate, p: float, kind: MeasureKind
) -> RiskEstimate:
    if base.kind is not MeasureKind.QUANTILE:
        raise ValueError(f"conversion needs a plain quantile estimate, got {base.tag}")
    factor = conversion_factor(kind, est.gamma_hat, est.n_covariates, p)
    cond = ConditionalMoments(mu_cond=base.mu_cond, sigma_cond=base.sigma_cond, m_x=est.m_x)
    return build_estimate(
        base.radial * factor.value,
        cond,
        base.level,
        base.se_ratio,
        base.regime,
        kind=kind,
        p=p,
        tail=base.tail,
        confidence=base.confidence,
        warnings=base.warnings,
    )


def lp_quantile_estimate(
    base: RiskEstimate, est: ExtremalEstimate, p: float
) -> RiskEstimate:
    """Extreme conditional Lp-quantile: the radial term scaled by f_L at the conditional index."""
    return _convert(base, est, p, MeasureKind.LP_QUANTILE)


def hg_estimate(base: RiskEstimate, est: ExtremalEstimate, p: float) -> RiskEstimate:
    """Extreme conditional Haezendonck-Goovaerts measure with phi(t) = t^p (p = 1 gives TVaR)."""
    return _convert(base, est, p, MeasureKind.HAEZENDONCK_GOOVAERTS)


def estimate_measure(
    base: RiskEstimate, est: ExtremalEstimate, kind: MeasureKind, p: float | None = None
) -> RiskEstimate:
    """Dispatch on the measure kind; the quantile passes through unchanged."""
    if kind is MeasureKind.QUANTILE:
        return base
    if p is None:
        raise ValueError(f"{kind.value} needs an order p")
    return _convert(base, est, p, kind)
