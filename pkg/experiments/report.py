"""Experiment report DTOs and their JSON and tidy CSV emitters."""

from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel, Field

from core.serialization import dump_json
from experiments.plan import ExperimentPlan

TIDY_COLUMNS = [
    "n",
    "measure",
    "replicate",
    "estimate",
    "oracle",
    "ratio",
    "standardized_error",
    "ci_low",
    "ci_high",
    "hit",
]


class ReplicateRecord(BaseModel):
    """Outcome of one replicate for one measure; failed replicates carry ``error``."""

    n: int
    measure: str
    replicate: int
    seed: int
    estimate: float | None = None
    oracle: float | None = None
    ratio: float | None = None
    standardized_error: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    hit: bool = False
    eta_hat: float | None = None
    ell_hat: float | None = None
    error: str | None = None


class CellSummary(BaseModel):
    """Aggregates over replicates for one (n, measure) cell."""

    n: int
    measure: str
    alpha: float
    k: int
    h: float
    replicates: int
    successes: int
    oracle: float | None = None
    empirical_variance: float | None = Field(
        default=None, description="Variance of the standardized errors; absent below 2 successes"
    )
    theoretical_variance: float | None = None
    coverage_count: int = Field(ge=0, description="Intervals containing the oracle")
    ell_coverage_count: int | None = Field(
        default=None, description="ell_hat intervals containing the true ell(x)"
    )
    relative_error_quantiles: list[float] | None = Field(
        default=None, description="min, q1, median, q3, max of estimate / oracle - 1"
    )
    mean_estimate: float | None = None
    mean_ell_hat: float | None = None
    median_abs_eta_error: float | None = None
    kurtosis: float | None = None
    failed_replicates: list[int] = Field(default_factory=list)


class ExperimentReport(BaseModel):
    plan: ExperimentPlan
    cells: list[CellSummary]
    records: list[ReplicateRecord]

    @property
    def failed(self) -> list[ReplicateRecord]:
        return [r for r in self.records if r.error is not None]

    def cell(self, n: int, measure: str) -> CellSummary:
        for cell in self.cells:
            if cell.n == n and cell.measure == measure:
                return cell
        raise KeyError((n, measure))

    def to_dict(self, include_records: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "plan": self.plan.model_dump(mode="json"),
            "cells": [cell.model_dump(mode="json") for cell in self.cells],
            "failed": [r.model_dump(mode="json") for r in self.failed],
        }
        if include_records:
            data["records"] = [r.model_dump(mode="json") for r in self.records]
        return data


def write_report_json(
    report: ExperimentReport, path: str | Path, extra: dict[str, Any] | None = None
) -> None:
    """Write the report (and any provenance fields in ``extra``) as indented JSON."""
    payload = report.to_dict()
    if extra:
        payload.update(extra)
    Path(path).write_bytes(dump_json(payload))


def tidy_frame(records: list[ReplicateRecord]) -> pd.DataFrame:
    """One row per (n, measure, replicate) with the plotting columns."""
    rows = [record.model_dump(include=set(TIDY_COLUMNS)) for record in records]
    return pd.DataFrame(rows, columns=TIDY_COLUMNS)


def write_tidy_csv(records: list[ReplicateRecord], path: str | Path) -> None:
    tidy_frame(records).to_csv(path, index=False, float_format="%.17g")
