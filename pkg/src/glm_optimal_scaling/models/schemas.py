from enum import StrEnum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ColumnKind(StrEnum):
    UNORDERED = "unordered-categorical"
    ORDERED = "ordered-categorical"
    CONTINUOUS = "continuous"
    BINARY = "binary"


class ScalingLevel(StrEnum):
    NUMERIC = "numeric"
    NOMINAL_STEP = "nominal-step"
    ORDINAL_STEP = "ordinal-step"
    SPLINE_NONMONOTONE = "spline-nonmonotone"
    SPLINE_MONOTONE = "spline-monotone"


SPLINE_LEVELS = frozenset({ScalingLevel.SPLINE_NONMONOTONE, ScalingLevel.SPLINE_MONOTONE})
MONOTONE_LEVELS = frozenset({ScalingLevel.ORDINAL_STEP, ScalingLevel.SPLINE_MONOTONE})

Family = Literal["logistic", "linear-os"]
Metric = Literal["brier", "deviance"]
ModelType = Literal["glm-os", "dummy-logistic"]


class ScalingSpec(BaseModel):
    """Scaling level of one predictor, with spline parameters for spline levels."""

    model_config = ConfigDict(frozen=True)

    level: ScalingLevel = ScalingLevel.NUMERIC
    degree: int = Field(default=2, ge=1)
    interior_knots: int = Field(default=1, ge=0)

    @property
    def is_spline(self) -> bool:
        return self.level in SPLINE_LEVELS

    @property
    def is_monotone(self) -> bool:
        return self.level in MONOTONE_LEVELS


class ColumnConfig(BaseModel):
    """Schema entry for one predictor column."""

    kind: ColumnKind
    level: ScalingLevel = ScalingLevel.NUMERIC
    degree: int = Field(default=2, ge=1)
    interior_knots: int = Field(default=1, ge=0)
    # Explicit category order for ordered columns with non-numeric labels
    categories: list[str] | None = None

    def spec(self) -> ScalingSpec:
        return ScalingSpec(
            level=self.level, degree=self.degree, interior_knots=self.interior_knots
        )


class FitOptions(BaseModel):
    max_cycles: int = Field(default=500, ge=1)
    # None picks the family default: 1e-8 for logistic, 1e-9 for linear-os
    tol: float | None = Field(default=None, gt=0)
    step_halving_max: int = Field(default=20, ge=0)


class CvOptions(BaseModel):
    folds: int = Field(default=10, ge=2)
    seed: int
    stratified: bool = True
    metric: Metric = "brier"
    n_jobs: int | None = None


class VariantConfig(BaseModel):
    """One model row of a cross-validation comparison table."""

    label: str
    model: ModelType = "glm-os"
    # Per-column overrides of the scaling spec declared under `columns`
    levels: dict[str, ScalingSpec] = Field(default_factory=dict)


class RunConfig(BaseModel):
    """Declarative run configuration, stored as JSON."""

    data: Path
    response: str
    positive_label: str | None = None
    family: Family = "logistic"
    delimiter: str = ","
    missing_values: list[str] = Field(default_factory=lambda: ["", "NA"])
    columns: dict[str, ColumnConfig]
    fit: FitOptions = Field(default_factory=FitOptions)
    cv: CvOptions | None = None
    merge_min_count: int = Field(default=1, ge=1)
    variants: list[VariantConfig] = Field(default_factory=list)
    out: Path = Path("out")

    @model_validator(mode="after")
    def check_columns(self) -> "RunConfig":
        if not self.columns:
            raise ValueError("at least one predictor column must be declared")
        if self.response in self.columns:
            raise ValueError(f"response column '{self.response}' is also declared as a predictor")
        for variant in self.variants:
            unknown = sorted(set(variant.levels) - set(self.columns))
            if unknown:
                raise ValueError(
                    f"variant '{variant.label}' overrides undeclared "
                    f"column(s): {', '.join(unknown)}"
                )
        return self

    def specs(self) -> dict[str, ScalingSpec]:
        return {name: column.spec() for name, column in self.columns.items()}


# ============================================================================
# Model artifact
# ============================================================================

ARTIFACT_FORMAT_VERSION = 1


class StandardizationSchema(BaseModel):
    mean: float
    scale: float = Field(gt=0)
    weight_total: float
    sign: Literal[1, -1] = 1


class SplineSchema(BaseModel):
    degree: int
    knots: list[float]
    intercept: float
    coefficients: list[float]


class VariableArtifact(BaseModel):
    name: str
    kind: ColumnKind
    spec: ScalingSpec
    beta: float
    labels: list[str]
    members: list[list[str]]
    positions: list[float]
    counts: list[int]
    numeric_labels: bool = False
    v: list[float]
    standardization: StandardizationSchema
    spline: SplineSchema | None = None
    notes: list[str] = Field(default_factory=list)


class ModelArtifact(BaseModel):
    format_version: Literal[1] = ARTIFACT_FORMAT_VERSION
    family: Family
    response: str
    intercept: float
    variables: list[VariableArtifact]
    trace: list[float]
    converged: bool
    cycles: int
    notes: list[str] = Field(default_factory=list)
