from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from glm_optimal_scaling.transforms import SplineBasis, SplineFit, Standardization

from .dataset import CategoryEncoding, FloatArray, _frozen
from .schemas import Family, ScalingLevel, ScalingSpec


@dataclass(frozen=True, eq=False)
class QuantificationSet:
    """Estimated quantifications of one predictor.

    ``standardization`` maps the raw transformation onto ``v``: the observed
    value for the numeric level, the spline value for spline levels and the
    restricted step values otherwise. ``encoding.g`` is empty for models
    loaded from an artifact.
    """

    encoding: CategoryEncoding
    spec: ScalingSpec
    v: FloatArray
    standardization: Standardization
    basis: SplineBasis | None = None
    spline: SplineFit | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", _frozen(self.v, np.float64))

    @property
    def name(self) -> str:
        return self.encoding.name

    @property
    def labels(self) -> tuple[str, ...]:
        return self.encoding.labels

    @property
    def level(self) -> ScalingLevel:
        return self.spec.level

    def spline_values(self, x: npt.ArrayLike) -> FloatArray:
        """Standardized spline transformation evaluated at raw values ``x``."""
        if self.basis is None or self.spline is None:
            raise ValueError(f"'{self.name}' has no fitted spline")
        raw = self.spline.intercept + self.basis.evaluate(x) @ self.spline.coefficients
        return self.standardization.apply(raw)


@dataclass(frozen=True, eq=False)
class FittedModel:
    family: Family
    response: str
    intercept: float
    betas: FloatArray
    quantifications: tuple[QuantificationSet, ...]
    trace: tuple[float, ...]
    converged: bool
    cycles: int
    notes: tuple[str, ...] = ()
    # In-sample fitted values; not part of the serialized artifact
    fitted: FloatArray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "betas", _frozen(self.betas, np.float64))
        if len(self.betas) != len(self.quantifications):
            raise ValueError("one coefficient per quantified predictor is required")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(q.name for q in self.quantifications)

    def quantification(self, name: str) -> QuantificationSet:
        for q in self.quantifications:
            if q.name == name:
                return q
        raise KeyError(name)

    def beta(self, name: str) -> float:
        return float(self.betas[self.names.index(name)])
