"""Standard dummy-coded logistic regression.

Serves as the comparison baseline of cross-validation tables and as the
reference the nominal and numeric GLM-OS fits must reproduce.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from glm_optimal_scaling.coordinates import (
    Coordinate,
    canonical_sign,
    initial_coordinates,
    linear_predictor,
    to_quantification,
)
from glm_optimal_scaling.data import Design
from glm_optimal_scaling.exceptions import DegenerateTransformError, RankDeficientError
from glm_optimal_scaling.families import PROBABILITY_EPS, LogisticFamily, classifies_perfectly
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import Dataset, FloatArray
from glm_optimal_scaling.models.fitted import FittedModel
from glm_optimal_scaling.models.schemas import ScalingLevel
from glm_optimal_scaling.transforms import standardize_quantification

logger = logging.getLogger(__name__)

COEFFICIENT_CAP = 30.0
# Beyond this |eta| the clamped probabilities stop moving
SATURATED_ETA = float(np.log((1.0 - PROBABILITY_EPS) / PROBABILITY_EPS))


@dataclass(frozen=True)
class DummyDesign:
    """Dense design: intercept, then per predictor one column (numeric level)
    or C_k - 1 indicator columns with the first category as reference."""

    matrix: FloatArray
    # (variable, column slice) in predictor order
    blocks: tuple[tuple[str, slice], ...]


@dataclass(frozen=True)
class DummyFit:
    coefficients: FloatArray
    negloglik: float
    iterations: int
    converged: bool
    separated: bool


def dummy_design(design: Design, n: int) -> DummyDesign:
    columns = [np.ones(n)]
    blocks = []
    for coordinate in initial_coordinates(design):
        start = len(columns)
        if coordinate.has_restriction:
            indicators = coordinate.enc.indicator_matrix()[:, 1:]
            columns.extend(indicators.T)
        else:
            columns.append(coordinate.phi)
        blocks.append((coordinate.name, slice(start, len(columns))))
    return DummyDesign(matrix=np.column_stack(columns), blocks=tuple(blocks))


def dummy_logistic_fit(
    y: FloatArray, matrix: FloatArray, max_iter: int = 100, tol: float = 1e-12
) -> DummyFit:
    """Logistic regression by Newton-Raphson (IRLS) on a dense design.

    Flags separation once the linear predictor classifies every row
    correctly, a coefficient exceeds the cap or a fitted probability reaches
    its clamp. A separated fit is never reported as converged.

    Raises:
        RankDeficientError: If ``matrix`` does not have full column rank
    """
    x = np.asarray(matrix, dtype=np.float64)
    rank = np.linalg.matrix_rank(x)
    if rank < x.shape[1]:
        raise RankDeficientError(f"design has rank {rank} but {x.shape[1]} columns")

    family = LogisticFamily()
    coefficients = np.zeros(x.shape[1])
    coefficients[0] = family.initial_intercept(y)
    nll = family.neg_loglik(x @ coefficients, y)
    converged = separated = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        grad, hess = family.gradient_hessian(x @ coefficients, y)
        step = linalg.solve(x.T @ (hess[:, None] * x), x.T @ grad, assume_a="pos")
        t = 1.0
        while True:
            candidate = coefficients - t * step
            candidate_nll = family.neg_loglik(x @ candidate, y)
            if candidate_nll <= nll or t < 1e-6:
                break
            t /= 2
        change = nll - candidate_nll
        coefficients, nll = candidate, candidate_nll
        eta = x @ coefficients
        if not separated and classifies_perfectly(eta, y):
            separated = True
            logger.warning(
                log_message("Every row classified correctly, separated data", iteration=iteration)
            )
        if np.max(np.abs(coefficients)) > COEFFICIENT_CAP or np.max(np.abs(eta)) >= SATURATED_ETA:
            separated = True
            logger.warning(
                log_message(
                    "Coefficient exceeds cap or probabilities saturated, likely separation",
                    cap=COEFFICIENT_CAP,
                    max_abs_coefficient=float(np.max(np.abs(coefficients))),
                )
            )
            break
        if np.max(np.abs(t * step)) < 1e-10 or abs(change) <= tol * max(nll, 1.0):
            # A separated fit only stops improving numerically
            converged = not separated
            break

    logger.info(
        log_message("Dummy logistic fit finished", iterations=iteration, negloglik=nll)
    )
    return DummyFit(
        coefficients=coefficients,
        negloglik=nll,
        iterations=iteration,
        converged=converged,
        separated=separated,
    )


def _absorb(coordinate: Coordinate, raw: FloatArray) -> float:
    """Store ``raw`` category effects as standardized v and beta.

    Returns the part of the effects that moves into the intercept.
    """
    try:
        v, standardization = standardize_quantification(raw, coordinate.enc.counts)
    except DegenerateTransformError:
        coordinate.beta = 0.0
        coordinate.flag("all dummy coefficients are zero")
        return float(raw[0])
    coordinate.v = v
    coordinate.standardization = standardization
    coordinate.beta = standardization.scale
    return standardization.mean


def model_from_dummy_fit(
    fit: DummyFit, ds: Dataset, design: Design, dummies: DummyDesign
) -> FittedModel:
    """Express a dummy-coded fit as a FittedModel.

    The dummy coefficients of a predictor, with 0 for the reference
    category, are standardized into v; their weighted scale becomes beta and
    their weighted mean moves into the intercept.
    """
    coordinates = initial_coordinates(design)
    intercept = float(fit.coefficients[0])
    for coordinate, (_, block) in zip(coordinates, dummies.blocks, strict=True):
        if coordinate.has_restriction:
            raw = np.concatenate([[0.0], fit.coefficients[block]])
            intercept += _absorb(coordinate, raw)
            # Dummy effects are unrestricted whatever level was requested
            coordinate.spec = coordinate.spec.model_copy(
                update={"level": ScalingLevel.NOMINAL_STEP}
            )
            coordinate.basis = None
            canonical_sign(coordinate)
        else:
            coordinate.beta = float(fit.coefficients[block][0])

    notes = []
    if fit.separated:
        notes.append(
            "separated data: every row classified correctly or coefficients diverging, "
            "no finite maximum likelihood estimate"
        )
    if not fit.converged and not fit.separated:
        notes.append(f"not converged after {fit.iterations} iterations")
    eta = linear_predictor(intercept, coordinates, ds.n)
    return FittedModel(
        family="logistic",
        response=ds.response,
        intercept=intercept,
        betas=np.array([c.beta for c in coordinates]),
        quantifications=tuple(to_quantification(c) for c in coordinates),
        trace=(fit.negloglik,),
        # Separated fits stop at the cap and count as finished
        converged=fit.converged or fit.separated,
        cycles=fit.iterations,
        notes=tuple(notes),
        fitted=LogisticFamily().inverse_link(eta),
    )


def fit_dummy_model(ds: Dataset, design: Design) -> FittedModel:
    """Dummy-coded logistic regression of ``ds`` on the predictors of ``design``."""
    dummies = dummy_design(design, ds.n)
    return model_from_dummy_fit(dummy_logistic_fit(ds.y, dummies.matrix), ds, design, dummies)
