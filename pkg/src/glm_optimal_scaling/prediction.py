"""Applying a fitted model to new rows."""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from glm_optimal_scaling.exceptions import DataError
from glm_optimal_scaling.families import get_family
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import FloatArray
from glm_optimal_scaling.models.fitted import FittedModel, QuantificationSet
from glm_optimal_scaling.models.schemas import ScalingLevel

logger = logging.getLogger(__name__)

CLASSIFICATION_THRESHOLD = 0.5

Cell = str | None


@dataclass(frozen=True)
class Prediction:
    """Predicted values per row.

    ``values`` are probabilities for the logistic family and fitted responses
    for linear OS-regression. ``unseen`` marks rows where some predictor had
    an unseen category or a missing cell and contributed 0.
    """

    eta: FloatArray
    values: FloatArray
    unseen: npt.NDArray[np.bool_]

    @property
    def n(self) -> int:
        return int(self.eta.shape[0])

    def classes(self) -> npt.NDArray[np.int_]:
        return (self.values >= CLASSIFICATION_THRESHOLD).astype(np.int_)


def _parse(cell: str, name: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"column '{name}' has an unparseable value '{cell}'") from None
    if not math.isfinite(value):
        raise DataError(f"column '{name}' has a non-finite value '{cell}'")
    return value


def transform_column(
    q: QuantificationSet, cells: Sequence[Cell]
) -> tuple[FloatArray, npt.NDArray[np.bool_]]:
    """Transformed predictor values for raw ``cells`` and the mask of zero-filled cells.

    Observed categories map to their quantification. A new value of a
    numeric column goes through the stored linear or spline transformation;
    anything else gets 0, the weighted mean of the quantifications.

    Raises:
        DataError: If a numeric column has an unparseable value
    """
    phi = np.zeros(len(cells))
    unseen = np.zeros(len(cells), dtype=bool)
    encoding = q.encoding
    interpolates = encoding.numeric_labels and q.level in (
        ScalingLevel.NUMERIC,
        ScalingLevel.SPLINE_NONMONOTONE,
        ScalingLevel.SPLINE_MONOTONE,
    )
    pending: list[int] = []
    values: list[float] = []
    for row, cell in enumerate(cells):
        if cell is None:
            unseen[row] = True
            continue
        category = encoding.category_of(cell)
        if category is not None:
            phi[row] = q.v[category]
        elif interpolates:
            pending.append(row)
            values.append(_parse(cell, q.name))
        else:
            if encoding.numeric_labels:
                _parse(cell, q.name)
            unseen[row] = True

    if pending:
        x = np.asarray(values)
        if q.level == ScalingLevel.NUMERIC or q.spline is None:
            phi[pending] = q.standardization.apply(x)
        else:
            phi[pending] = q.spline_values(x)
    return phi, unseen


def predict(model: FittedModel, rows: Mapping[str, Sequence[Cell]]) -> Prediction:
    """Predict rows given as column name -> raw cells (None for missing).

    Raises:
        DataError: If a model predictor is absent from ``rows`` or a value
            cannot be parsed
    """
    missing = [name for name in model.names if name not in rows]
    if missing:
        raise DataError(f"prediction rows lack model column(s): {', '.join(missing)}")
    lengths = {len(rows[name]) for name in model.names}
    if len(lengths) > 1:
        raise DataError("prediction columns have different lengths")
    n = lengths.pop() if lengths else 0

    eta = np.full(n, model.intercept, dtype=np.float64)
    unseen = np.zeros(n, dtype=bool)
    for q, beta in zip(model.quantifications, model.betas, strict=True):
        phi, zero_filled = transform_column(q, rows[q.name])
        eta += beta * phi
        unseen |= zero_filled
        if zero_filled.any():
            logger.info(
                log_message(
                    "Unseen or missing values scored as 0",
                    variable=q.name,
                    rows=int(zero_filled.sum()),
                )
            )

    if model.family == "linear-os":
        values = eta.copy()
    else:
        values = get_family(model.family).inverse_link(eta)
    return Prediction(eta=eta, values=values, unseen=unseen)
