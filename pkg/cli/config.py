"""The ``--config`` document and environment overrides."""

import os
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from core.model_spec import ModelSpec
from core.serialization import load_json
from core.types import HillMode, KernelKind, MeasureKind
from experiments.plan import ExperimentPlan

THREADS_ENV = "CETA_THREADS"


class RunConfig(BaseModel):
    """Everything a CLI run needs; flags given on the command line take precedence."""

    model: ModelSpec | None = None
    x: list[float] | None = None
    sample_path: str | None = Field(default=None, description="Headerless CSV sample")

    # Sequences
    a: float | None = Field(default=None, gt=0)
    b: float | None = Field(default=None, gt=0, lt=1)
    c: float | None = Field(default=None, gt=0)
    k: int | None = Field(default=None, ge=1, description="Overrides n^b")
    bandwidth: float | None = Field(default=None, gt=0, description="Overrides n^-c")
    rho: float | None = Field(default=None, lt=0)

    # Estimators
    kernel: KernelKind | None = None
    hill_mode: HillMode | None = None
    component_index: int | None = Field(default=None, ge=0)
    measure: MeasureKind | None = None
    p: float | None = Field(default=None, ge=1)
    confidence: float | None = Field(default=None, gt=0, lt=1)

    # Real data
    returns_path: str | None = None
    covariates: list[str] | None = None
    target: str | None = None
    date_column: str | None = None
    eval_row: int | None = None

    # Monte-Carlo
    plan: ExperimentPlan | None = None

    seed: int | None = Field(default=None, ge=0)
    n: int | None = Field(default=None, ge=2)
    threads: int | None = Field(default=None, ge=1)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        return cls.model_validate(load_json(path))

    def merged(self, overrides: dict[str, Any]) -> "RunConfig":
        """Copy with every non-None entry of ``overrides`` applied, then revalidated."""
        data = self.model_dump(mode="json", exclude_none=True)
        data.update({key: value for key, value in overrides.items() if value is not None})
        return RunConfig.model_validate(data)

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


def resolve_threads(cli_value: int | None) -> int:
    """``--threads``, then ``CETA_THREADS``, then 1."""
    if cli_value is not None:
        return max(1, cli_value)
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
