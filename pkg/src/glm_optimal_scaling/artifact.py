"""Versioned JSON model artifact."""

import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from glm_optimal_scaling.exceptions import ArtifactError
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import CategoryEncoding
from glm_optimal_scaling.models.fitted import FittedModel, QuantificationSet
from glm_optimal_scaling.models.schemas import (
    ModelArtifact,
    SplineSchema,
    StandardizationSchema,
    VariableArtifact,
)
from glm_optimal_scaling.transforms import SplineBasis, SplineFit, Standardization, ispline_values

logger = logging.getLogger(__name__)


def _variable_artifact(q: QuantificationSet, beta: float) -> VariableArtifact:
    spline = None
    if q.spline is not None and q.basis is not None:
        spline = SplineSchema(
            degree=q.basis.degree,
            knots=q.basis.knots.tolist(),
            intercept=q.spline.intercept,
            coefficients=q.spline.coefficients.tolist(),
        )
    enc = q.encoding
    return VariableArtifact(
        name=q.name,
        kind=enc.kind,
        spec=q.spec,
        beta=beta,
        labels=list(enc.labels),
        members=[list(m) for m in enc.members],
        positions=enc.positions.tolist(),
        counts=enc.counts.tolist(),
        numeric_labels=enc.numeric_labels,
        v=q.v.tolist(),
        standardization=StandardizationSchema(
            mean=q.standardization.mean,
            scale=q.standardization.scale,
            weight_total=q.standardization.weight_total,
            sign=1 if q.standardization.sign > 0 else -1,
        ),
        spline=spline,
        notes=list(q.notes),
    )


def to_artifact(model: FittedModel) -> ModelArtifact:
    return ModelArtifact(
        family=model.family,
        response=model.response,
        intercept=model.intercept,
        variables=[
            _variable_artifact(q, float(beta))
            for q, beta in zip(model.quantifications, model.betas, strict=True)
        ],
        trace=list(model.trace),
        converged=model.converged,
        cycles=model.cycles,
        notes=list(model.notes),
    )


def _quantification(variable: VariableArtifact) -> QuantificationSet:
    positions = np.asarray(variable.positions, dtype=np.float64)
    encoding = CategoryEncoding(
        name=variable.name,
        kind=variable.kind,
        g=np.empty(0, dtype=np.intp),
        labels=tuple(variable.labels),
        members=tuple(tuple(m) for m in variable.members),
        positions=positions,
        counts=np.asarray(variable.counts, dtype=np.intp),
        numeric_labels=variable.numeric_labels,
    )
    basis = spline = None
    if variable.spline is not None:
        knots = np.asarray(variable.spline.knots, dtype=np.float64)
        basis = SplineBasis(
            degree=variable.spline.degree,
            knots=knots,
            matrix=ispline_values(positions, knots, variable.spline.degree),
        )
        spline = SplineFit(
            intercept=variable.spline.intercept,
            coefficients=np.asarray(variable.spline.coefficients, dtype=np.float64),
        )
    return QuantificationSet(
        encoding=encoding,
        spec=variable.spec,
        v=np.asarray(variable.v, dtype=np.float64),
        standardization=Standardization(**variable.standardization.model_dump()),
        basis=basis,
        spline=spline,
        notes=tuple(variable.notes),
    )


def from_artifact(artifact: ModelArtifact) -> FittedModel:
    for variable in artifact.variables:
        lengths = {len(variable.labels), len(variable.members), len(variable.positions)}
        lengths |= {len(variable.counts), len(variable.v)}
        if len(lengths) != 1:
            raise ArtifactError(f"variable '{variable.name}' has inconsistent category arrays")
    return FittedModel(
        family=artifact.family,
        response=artifact.response,
        intercept=artifact.intercept,
        betas=np.array([variable.beta for variable in artifact.variables]),
        quantifications=tuple(_quantification(variable) for variable in artifact.variables),
        trace=tuple(artifact.trace),
        converged=artifact.converged,
        cycles=artifact.cycles,
        notes=tuple(artifact.notes),
    )


def save_model(model: FittedModel, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_artifact(model).model_dump_json(indent=2), encoding="utf-8")
    logger.info(log_message("Model artifact written", path=str(path)))


def load_model(path: Path) -> FittedModel:
    """Read a model artifact.

    Raises:
        ArtifactError: If the file is missing, corrupt or of an unknown version
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ArtifactError(f"Cannot read model artifact {path}: {e}") from e
    try:
        artifact = ModelArtifact.model_validate_json(text)
    except ValidationError as e:
        logger.error(log_message("Invalid model artifact", path=str(path), errors=e.error_count()))
        raise ArtifactError(f"Invalid model artifact {path}: {e}") from e
    return from_artifact(artifact)
