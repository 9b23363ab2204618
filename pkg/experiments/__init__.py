"""Monte-Carlo studies of the conditional risk estimators."""

from .asymptotics import asymptotic_variance_table, high_variance, intermediate_variance
from .plan import ExperimentPlan, MeasureSpec
from .report import (
    CellSummary,
    ExperimentReport,
    ReplicateRecord,
    write_report_json,
    write_tidy_csv,
)
from .runner import ExperimentRunner, run

__all__ = [
    "CellSummary",
    "ExperimentPlan",
    "ExperimentReport",
    "ExperimentRunner",
    "MeasureSpec",
    "ReplicateRecord",
    "asymptotic_variance_table",
    "high_variance",
    "intermediate_variance",
    "run",
    "write_report_json",
    "write_tidy_csv",
]
