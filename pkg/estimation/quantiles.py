"""Intermediate and high extreme conditional quantile estimators."""

import math
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field, model_validator
from scipy.stats import norm

from core.elliptical import ConditionalMoments
from core.errors import EstimationError, OrderStatisticError
from core.types import MeasureKind, QuantileRegime, Tail
from estimation.extremal import ExtremalEstimate
from estimation.schedule import SequenceSchedule, check_conditions

logger = structlog.get_logger(__name__)


def kind_tag(kind: MeasureKind, p: float | None) -> str:
    """``quantile``, ``lp:2`` or ``hg:1``."""
    if kind is MeasureKind.QUANTILE:
        return kind.value
    return f"{kind.value}:{p:g}"


class RiskEstimate(BaseModel):
    """An extreme conditional risk estimate with its asymptotic confidence interval.

    ``radial`` is the order-statistic term before scaling by sigma_{Y|X} and adding
    mu_{Y|X}; risk-measure conversions multiply it by their factor.
    """

    kind: MeasureKind = MeasureKind.QUANTILE
    p: float | None = Field(default=None, ge=1)
    level: float = Field(gt=0, lt=1)
    value: float
    radial: float
    mu_cond: float
    sigma_cond: float = Field(gt=0)
    se_ratio: float = Field(ge=0)
    ci_low: float
    ci_high: float
    confidence: float = Field(default=0.95, gt=0, lt=1)
    regime: QuantileRegime
    tail: Tail = Tail.UPPER
    warnings: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_interval(self) -> "RiskEstimate":
        if not self.ci_low <= self.value <= self.ci_high:
            raise ValueError(
                f"interval [{self.ci_low}, {self.ci_high}] does not contain {self.value}"
            )
        return self

    @property
    def tag(self) -> str:
        return kind_tag(self.kind, self.p)

    def covers(self, truth: float) -> bool:
        return self.ci_low <= truth <= self.ci_high

    def to_dict(self) -> dict[str, Any]:
        data = self.model_dump(mode="json")
        data["kind"] = self.tag
        return data

    def summary(self) -> str:
        """One-line human summary."""
        return (
            f"{self.tag} {self.tail.value} alpha={self.level:.7g} ({self.regime.value}): "
            f"{self.value:.6g} [{self.ci_low:.6g}, {self.ci_high:.6g}]"
        )


def build_estimate(
    radial: float,
    cond: ConditionalMoments,
    level: float,
    se_ratio: float,
    regime: QuantileRegime,
    *,
    kind: MeasureKind = MeasureKind.QUANTILE,
    p: float | None = None,
    tail: Tail = Tail.UPPER,
    confidence: float = 0.95,
    warnings: list[str] | None = None,
) -> RiskEstimate:
    """Place a radial term on the conditional location-scale and attach its interval.

    The lower tail reflects through mu_{Y|X}: q_{1-alpha} = 2 mu - q_alpha.
    """
    sign = 1.0 if tail is Tail.UPPER else -1.0
    value = cond.mu_cond + sign * cond.sigma_cond * radial
    half_width = float(norm.ppf(0.5 + confidence / 2.0)) * se_ratio * abs(value)
    return RiskEstimate(
        kind=kind,
        p=p,
        level=level,
        value=value,
        radial=radial,
        mu_cond=cond.mu_cond,
        sigma_cond=cond.sigma_cond,
        se_ratio=se_ratio,
        ci_low=value - half_width,
        ci_high=value + half_width,
        confidence=confidence,
        regime=regime,
        tail=tail,
        warnings=list(warnings or []),
    )


def _descending(w: ArrayLike) -> np.ndarray:
    return np.sort(np.asarray(w, dtype=float).reshape(-1), kind="stable")[::-1]


def _order_statistic(ordered: np.ndarray, rank: int) -> float:
    """One-based descending order statistic W_[rank], required positive."""
    if not 1 <= rank <= ordered.size:
        raise OrderStatisticError(f"order statistic rank {rank} outside [1, {ordered.size}]")
    value = float(ordered[rank - 1])
    if value <= 0.0:
        raise OrderStatisticError(f"W_[{rank}] = {value:.6g} is not positive")
    return value


def _level_term(ell_hat: float, alpha: float) -> float:
    """2 + ell (1/(1 - alpha) - 2), the inverse of v_tilde."""
    return 2.0 + ell_hat * (1.0 / (1.0 - alpha) - 2.0)


def _condition_warnings(schedule: SequenceSchedule, names: list[str]) -> list[str]:
    report = check_conditions(schedule)
    return [f"condition {r.name} fails: {r.inequality}" for r in report.failures(names)]


def intermediate_quantile(
    w: ArrayLike,
    cond: ConditionalMoments,
    est: ExtremalEstimate,
    schedule: SequenceSchedule,
    *,
    tail: Tail = Tail.UPPER,
    confidence: float = 0.95,
) -> RiskEstimate:
    """Order-statistic estimator mu + sigma W_[floor(n v) + 1]^{1/eta} for a < 1."""
    ordered = _descending(w)
    n = ordered.size
    alpha = schedule.alpha(n)
    warnings = list(est.warnings) + _condition_warnings(schedule, ["C", "C_int"])

    term = _level_term(est.ell_hat, alpha)
    cap = (n - 1) / n
    if not (math.isfinite(term) and term > 0.0):
        warnings.append(f"level term {term:.6g} is not positive; v_tilde clamped to {cap:.6g}")
        v_tilde = cap
    else:
        v_tilde = 1.0 / term
    if v_tilde > cap:
        warnings.append(f"v_tilde = {v_tilde:.6g} clamped to {cap:.6g}")
        v_tilde = cap
    rank = math.floor(n * v_tilde) + 1
    radial = _order_statistic(ordered, rank) ** (1.0 / est.eta_hat)

    gamma, n_cov = est.gamma_hat, est.n_covariates
    variance = n_cov**2 * gamma**4 / (gamma * n_cov + 1.0) ** 4
    se_ratio = math.sqrt(variance) * abs(math.log(1.0 - alpha)) / math.sqrt(est.k)
    logger.debug("intermediate_quantile", alpha=alpha, rank=rank, v_tilde=v_tilde)
    return build_estimate(
        radial,
        cond,
        alpha,
        se_ratio,
        QuantileRegime.INTERMEDIATE,
        tail=tail,
        confidence=confidence,
        warnings=warnings,
    )


def high_quantile(
    w: ArrayLike,
    cond: ConditionalMoments,
    est: ExtremalEstimate,
    schedule: SequenceSchedule,
    *,
    tail: Tail = Tail.UPPER,
    confidence: float = 0.95,
) -> RiskEstimate:
    """Extrapolated estimator [W_[k+1] (k/(n v_tilde))^gamma]^{1/eta} for a > 1."""
    ordered = _descending(w)
    n = ordered.size
    k = est.k
    if k + 1 > n:
        raise OrderStatisticError(f"k + 1 = {k + 1} exceeds the sample size {n}")
    alpha = schedule.alpha(n)
    warnings = list(est.warnings) + _condition_warnings(schedule, ["C", "C_high"])

    extrapolation = (k / n) * _level_term(est.ell_hat, alpha)
    if not extrapolation > 0.0:
        raise EstimationError(f"extrapolation factor {extrapolation:.6g} is not positive")
    threshold = _order_statistic(ordered, k + 1)
    radial = (threshold * extrapolation**est.gamma_hat) ** (1.0 / est.eta_hat)

    theta = schedule.theta()
    if theta is None:
        # finite-n counterpart of a / (a + b - 1)
        theta = math.log(1.0 - alpha) / math.log(n * (1.0 - alpha) / k)
    gamma, n_cov = est.gamma_hat, est.n_covariates
    scale = gamma * n_cov + 1.0
    spread = abs(gamma / scale - theta * n_cov * gamma**2 / scale**2)
    se_ratio = spread * abs(math.log(k / (n * (1.0 - alpha)))) / math.sqrt(k)
    logger.debug("high_quantile", alpha=alpha, k=k, extrapolation=extrapolation)
    return build_estimate(
        radial,
        cond,
        alpha,
        se_ratio,
        QuantileRegime.HIGH,
        tail=tail,
        confidence=confidence,
        warnings=warnings,
    )


def estimate_quantile(
    w: ArrayLike,
    cond: ConditionalMoments,
    est: ExtremalEstimate,
    schedule: SequenceSchedule,
    *,
    tail: Tail = Tail.UPPER,
    confidence: float = 0.95,
) -> RiskEstimate:
    """Dispatch on the schedule regime (a < 1 intermediate, otherwise high)."""
    if schedule.regime is QuantileRegime.INTERMEDIATE:
        return intermediate_quantile(w, cond, est, schedule, tail=tail, confidence=confidence)
    estimate = high_quantile(w, cond, est, schedule, tail=tail, confidence=confidence)
    if schedule.a == 1.0:
        message = "a = 1 lies between the intermediate and high regimes; using the high estimator"
        logger.warning("boundary_level", a=schedule.a)
        estimate = estimate.model_copy(update={"warnings": [*estimate.warnings, message]})
    return estimate
