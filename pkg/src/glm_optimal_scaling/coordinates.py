"""Per-predictor working state shared by the alternating fitters."""

import logging
from dataclasses import dataclass, field

import numpy as np

from glm_optimal_scaling.data import Design
from glm_optimal_scaling.exceptions import DegenerateTransformError
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import CategoryEncoding, FloatArray
from glm_optimal_scaling.models.fitted import QuantificationSet
from glm_optimal_scaling.models.schemas import ScalingLevel, ScalingSpec
from glm_optimal_scaling.transforms import (
    Restricted,
    SplineBasis,
    SplineFit,
    Standardization,
    restrict,
    standardize_quantification,
)

logger = logging.getLogger(__name__)

ZERO_BETA = 1e-12
DEGENERATE_NOTE = "degenerate restricted quantification, previous estimate kept"


@dataclass
class Coordinate:
    """Mutable (v_k, beta_k) block of one predictor during fitting."""

    enc: CategoryEncoding
    spec: ScalingSpec
    basis: SplineBasis | None
    v: FloatArray
    standardization: Standardization
    beta: float = 0.0
    spline: SplineFit | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.enc.name

    @property
    def phi(self) -> FloatArray:
        return self.v[self.enc.g]

    @property
    def has_restriction(self) -> bool:
        return self.spec.level != ScalingLevel.NUMERIC

    def flag(self, note: str) -> None:
        if note not in self.notes:
            self.notes.append(note)
            logger.warning(log_message(note, variable=self.name))

    def restricted(self, target: FloatArray, weights: FloatArray) -> Restricted | None:
        """Restrict ``target``; None (with a flag) when the result is degenerate.

        The flag is withdrawn again by the next successful restriction.
        """
        try:
            result = restrict(target, weights, self.spec, self.basis, counts=self.enc.counts)
        except DegenerateTransformError:
            self.flag(DEGENERATE_NOTE)
            return None
        if DEGENERATE_NOTE in self.notes:
            self.notes.remove(DEGENERATE_NOTE)
        return result

    def accept(self, restricted: Restricted) -> None:
        self.v = restricted.v
        self.standardization = restricted.standardization
        self.spline = restricted.spline


def initial_coordinates(design: Design) -> list[Coordinate]:
    """Z-scored observed values (or ranks) as starting quantifications."""
    coordinates = []
    for name in design.names:
        enc = design.encodings[name]
        v, standardization = standardize_quantification(enc.positions, enc.counts)
        coordinates.append(
            Coordinate(
                enc=enc,
                spec=design.specs[name],
                basis=design.bases.get(name),
                v=v,
                standardization=standardization,
                notes=list(design.notes.get(name, [])),
            )
        )
    return coordinates


def linear_predictor(intercept: float, coordinates: list[Coordinate], n: int) -> FloatArray:
    eta = np.full(n, intercept, dtype=np.float64)
    for coordinate in coordinates:
        eta += coordinate.beta * coordinate.phi
    return eta


def canonical_sign(coordinate: Coordinate) -> None:
    """Make the first nonzero quantification positive, flipping beta along.

    (beta, v) and (-beta, -v) give the same linear predictor. The numeric
    level is left alone so its transformation stays increasing in the
    observed value.
    """
    if not coordinate.has_restriction:
        return
    nonzero = np.flatnonzero(np.abs(coordinate.v) > ZERO_BETA)
    if nonzero.size == 0 or coordinate.v[nonzero[0]] > 0:
        return
    coordinate.v = -coordinate.v
    coordinate.beta = -coordinate.beta
    coordinate.standardization = coordinate.standardization.flipped()


def to_quantification(coordinate: Coordinate) -> QuantificationSet:
    return QuantificationSet(
        encoding=coordinate.enc,
        spec=coordinate.spec,
        v=coordinate.v.copy(),
        standardization=coordinate.standardization,
        basis=coordinate.basis,
        spline=coordinate.spline,
        notes=tuple(coordinate.notes),
    )
