"""Monte-Carlo experiment plans."""

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from core.model_spec import ModelSpec
from core.types import FamilyKind, HillMode, KernelKind, MeasureKind
from estimation.quantiles import kind_tag
from estimation.schedule import SequenceSchedule

# sizes above this need allow_large (runtime of several minutes per replicate batch)
DESK_SCALE_MAX_N = 1_000_000


class MeasureSpec(BaseModel):
    """A risk measure to estimate in every replicate."""

    kind: MeasureKind = MeasureKind.QUANTILE
    p: float | None = Field(default=None, ge=1, description="Order of Lp or HG measures")

    @model_validator(mode="after")
    def validate_order(self) -> "MeasureSpec":
        if self.kind is not MeasureKind.QUANTILE and self.p is None:
            raise ValueError(f"{self.kind.value} measures need an order p")
        if self.kind is MeasureKind.QUANTILE:
            self.p = None
        return self

    @property
    def tag(self) -> str:
        return kind_tag(self.kind, self.p)


class ExperimentPlan(BaseModel):
    """Sample sizes, replicates and estimator settings of a simulation study."""

    # Model and conditioning point
    model: ModelSpec = Field(description="Joint law of (X, Y)")
    x: list[float] = Field(min_length=1, description="Covariate point")

    # Sequences
    schedule: SequenceSchedule
    kernel: KernelKind = Field(default=KernelKind.GAUSSIAN)
    hill_mode: HillMode = Field(default=HillMode.COMPONENT)
    component_index: int = Field(default=0, ge=0)

    # Replication
    sizes: list[int] = Field(min_length=1, description="Sample sizes n, strictly increasing")
    replicates: int = Field(ge=1, description="Replicates per sample size")
    measures: list[MeasureSpec] = Field(default_factory=lambda: [MeasureSpec()])
    base_seed: int = Field(default=0, ge=0, description="Replicate i uses base_seed + i")
    confidence: float = Field(default=0.95, gt=0, lt=1)
    allow_large: bool = Field(default=False, description="Permit n above 10^6")

    @field_validator("sizes")
    @classmethod
    def validate_sizes(cls, v: list[int]) -> list[int]:
        """Validate that sizes are at least 2 and strictly increasing."""
        if any(n < 2 for n in v):
            raise ValueError("Sample sizes must be at least 2")
        if any(b <= a for a, b in zip(v[:-1], v[1:], strict=True)):
            raise ValueError("Sample sizes must be strictly increasing")
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> "ExperimentPlan":
        if len(self.model.mu) != len(self.x) + 1:
            raise ValueError(
                f"model dimension {len(self.model.mu)} must be len(x) + 1 = {len(self.x) + 1}"
            )
        if self.schedule.n_covariates != len(self.x):
            raise ValueError(
                f"schedule.n_covariates = {self.schedule.n_covariates} does not match len(x)"
            )
        if not self.allow_large and max(self.sizes) > DESK_SCALE_MAX_N:
            raise ValueError(
                f"sizes above {DESK_SCALE_MAX_N} need allow_large (multi-minute runtime)"
            )
        return self

    @classmethod
    def student_study(
        cls,
        sizes: list[int] | None = None,
        replicates: int = 100,
        base_seed: int = 0,
        nu: float = 2.0,
        n_covariates: int = 3,
        a: float = 1.25,
        measures: list[MeasureSpec] | None = None,
    ) -> "ExperimentPlan":
        """Student law with identity scale and x = (1, 0, ..., 0), so that M(x) = 1."""
        dim = n_covariates + 1
        x = [1.0] + [0.0] * (n_covariates - 1)
        return cls(
            model=ModelSpec(
                family=FamilyKind.STUDENT,
                nu=nu,
                mu=[0.0] * dim,
                sigma=np.eye(dim).tolist(),
            ),
            x=x,
            schedule=SequenceSchedule(
                a=a,
                b=0.6,
                c=0.2,
                rho=-2.0 / nu,
                gamma_ref=1.0 / nu,
                n_covariates=n_covariates,
            ),
            sizes=sizes or [1_000, 10_000, 100_000, 1_000_000],
            replicates=replicates,
            base_seed=base_seed,
            measures=measures or [MeasureSpec()],
        )
