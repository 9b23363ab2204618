"""Tail-index, generator, quantile and risk-measure estimators."""

from .extremal import ExtremalEstimate, estimate_ell, estimate_extremal, variance_v1, variance_v2
from .hill import HillConfig, estimate_eta, hill, hill_path, tail_statistic
from .kernel import KernelConfig, kernel_density, kernel_generator_estimate, kernel_l2_norm
from .quantiles import RiskEstimate, estimate_quantile, high_quantile, intermediate_quantile
from .risk_measures import (
    conditional_tail_index,
    conversion_factor,
    estimate_measure,
    f_H,
    f_L,
    hg_estimate,
    lp_quantile_estimate,
)
from .schedule import ConditionReport, SequenceSchedule, check_conditions

__all__ = [
    "ConditionReport",
    "ExtremalEstimate",
    "HillConfig",
    "KernelConfig",
    "RiskEstimate",
    "SequenceSchedule",
    "check_conditions",
    "conditional_tail_index",
    "conversion_factor",
    "estimate_ell",
    "estimate_eta",
    "estimate_extremal",
    "estimate_measure",
    "estimate_quantile",
    "f_H",
    "f_L",
    "hg_estimate",
    "high_quantile",
    "hill",
    "hill_path",
    "intermediate_quantile",
    "kernel_density",
    "kernel_generator_estimate",
    "kernel_l2_norm",
    "lp_quantile_estimate",
    "tail_statistic",
    "variance_v1",
    "variance_v2",
]
