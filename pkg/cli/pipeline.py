"""End-to-end estimation on a returns table: moments, tail index, generator, quantile."""

from dataclasses import dataclass
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike

from cli.returns import ReturnsTable, estimate_moments
from core.elliptical import EllipticalModel, conditional_moments, mahalanobis_many
from core.types import HillMode, KernelKind, MeasureKind, Tail
from estimation.extremal import ExtremalEstimate, estimate_extremal
from estimation.hill import HillConfig, tail_statistic
from estimation.kernel import KernelConfig
from estimation.quantiles import RiskEstimate, estimate_quantile
from estimation.risk_measures import estimate_measure
from estimation.schedule import (
    ConditionReport,
    SequenceSchedule,
    check_conditions,
    order_count,
)

logger = structlog.get_logger(__name__)


def format_percent(value: float, digits: int = 7) -> str:
    """Decimal return shown as a percentage, e.g. 0.03744985 -> '3.744985%'."""
    return f"{value * 100.0:.{digits}g}%"


@dataclass(frozen=True)
class PipelineResult:
    model: EllipticalModel
    m_x: float
    schedule: SequenceSchedule
    extremal: ExtremalEstimate
    quantile: RiskEstimate
    risk: RiskEstimate
    conditions: ConditionReport

    @property
    def alpha(self) -> float:
        return self.quantile.level

    def to_dict(self) -> dict[str, Any]:
        return {
            "m_x": self.m_x,
            "a": self.schedule.a,
            "b": self.schedule.b,
            "c": self.schedule.c,
            "alpha": self.alpha,
            "extremal": self.extremal.to_dict(),
            "quantile": self.quantile.to_dict(),
            "risk": self.risk.to_dict(),
            "conditions": self.conditions.model_dump(mode="json"),
            "mu": self.model.mu.tolist(),
            "sigma": self.model.sigma.tolist(),
        }


def real_data_pipeline(
    table: ReturnsTable,
    x: ArrayLike,
    b: float,
    c: float,
    a: float | None = None,
    *,
    kernel: KernelKind = KernelKind.GAUSSIAN,
    hill_mode: HillMode = HillMode.COMPONENT,
    component_index: int = 0,
    rho: float = -1.0,
    measure: MeasureKind = MeasureKind.QUANTILE,
    p: float | None = None,
    tail: Tail = Tail.UPPER,
    confidence: float = 0.95,
) -> PipelineResult:
    """Estimate an extreme conditional risk measure of the target given covariates ``x``.

    Args:
        table: Learning sample; covariates first, target last.
        x: Covariate values at which to condition.
        b: k_n = n^b.
        c: h_n = n^-c.
        a: alpha_n = 1 - n^-a; None picks the variance-minimizing (1 - b) eta_hat.
        kernel: Smoothing kernel for the generator estimate.
        hill_mode: Statistic fed to the Hill estimator.
        component_index: Whitened coordinate in component mode.
        rho: Second-order index used only for condition checks.
        measure: Quantile, Lp-quantile or HG measure.
        p: Order of the Lp or HG measure.
        tail: Upper or lower tail.
        confidence: Interval level.

    Returns:
        The fitted model, the extremal and risk estimates, and the condition report.
    """
    mu, sigma = estimate_moments(table)
    model = EllipticalModel(mu=mu, sigma=sigma)
    point = np.asarray(x, dtype=float).reshape(-1)
    n_covariates = len(table.covariate_columns)
    cond = conditional_moments(model, point)
    covariates = table.values()[:, :n_covariates]
    n = table.n

    hill_config = HillConfig(
        k=min(n - 1, order_count(n, b)), component_index=component_index, mode=hill_mode
    )
    w = tail_statistic(model, covariates, hill_config)
    extremal = estimate_extremal(
        w,
        mahalanobis_many(model, covariates),
        cond.m_x,
        n_covariates,
        hill_config,
        KernelConfig(bandwidth=n ** (-c), kernel=kernel),
    )
    if a is None:
        a = SequenceSchedule.auto_a(extremal.eta_hat, b)
        logger.info("level_exponent_selected", a=a, eta_hat=extremal.eta_hat)
    schedule = SequenceSchedule(
        a=a, b=b, c=c, rho=rho, gamma_ref=extremal.gamma_hat, n_covariates=n_covariates
    )
    quantile = estimate_quantile(w, cond, extremal, schedule, tail=tail, confidence=confidence)
    risk = estimate_measure(quantile, extremal, measure, p)
    logger.info(
        "real_data_estimated",
        n=n,
        m_x=cond.m_x,
        eta_hat=extremal.eta_hat,
        ell_hat=extremal.ell_hat,
        alpha=quantile.level,
        value=risk.value,
    )
    return PipelineResult(
        model=model,
        m_x=cond.m_x,
        schedule=schedule,
        extremal=extremal,
        quantile=quantile,
        risk=risk,
        conditions=check_conditions(schedule),
    )
