"""Linear regression with optimally scaled predictors (alternating least squares)."""

import logging

import numpy as np

from glm_optimal_scaling.coordinates import (
    Coordinate,
    canonical_sign,
    initial_coordinates,
    linear_predictor,
    to_quantification,
)
from glm_optimal_scaling.data import Design
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import CategoryEncoding, Dataset, FloatArray
from glm_optimal_scaling.models.fitted import FittedModel
from glm_optimal_scaling.models.schemas import FitOptions

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


def update_vk_linear(u: FloatArray, enc: CategoryEncoding, beta: float) -> FloatArray:
    """Category means of the working residual, carrying only the sign of ``beta``.

    The magnitude of beta is irrelevant because the result is standardized
    afterwards; a zero beta counts as positive.
    """
    sign = -1.0 if beta < 0 else 1.0
    return sign * np.bincount(enc.g, weights=u, minlength=enc.n_categories) / enc.counts


def update_betak_linear(u: FloatArray, enc: CategoryEncoding, v: FloatArray) -> float:
    """Least squares coefficient of ``u`` on the transformed predictor v[g]."""
    return float(v[enc.g] @ u) / float(v @ (enc.counts * v))


def _loss(residual: FloatArray) -> float:
    return float(residual @ residual)


def os_linear_fit(
    ds: Dataset, design: Design, options: FitOptions | None = None
) -> FittedModel:
    """Fit the linear OS-regression model.

    The response is centered; its mean becomes the model intercept.
    Starting quantifications are the z-scored observed values and the
    starting coefficients their least squares fit.
    """
    options = options or FitOptions()
    tol = options.tol or DEFAULT_TOL
    mean = float(np.mean(ds.y))
    yc = ds.y - mean

    coordinates: list[Coordinate] = initial_coordinates(design)
    if coordinates:
        phi = np.column_stack([c.phi for c in coordinates])
        start, *_ = np.linalg.lstsq(phi, yc, rcond=None)
        for coordinate, beta in zip(coordinates, start, strict=True):
            coordinate.beta = float(beta)

    fitted = linear_predictor(0.0, coordinates, ds.n)
    loss = _loss(yc - fitted)
    trace = [loss]
    converged = False
    cycle = 0
    logger.info(log_message("OS-regression fit started", n=ds.n, p=len(coordinates), loss=loss))

    for cycle in range(1, options.max_cycles + 1):
        start_loss = loss
        max_beta_change = 0.0
        for coordinate in coordinates:
            # Step 1: working residual without predictor k
            phi_k = coordinate.phi
            u = yc - (fitted - coordinate.beta * phi_k)
            # Step 2: restricted quantifications
            if coordinate.has_restriction:
                target = update_vk_linear(u, coordinate.enc, coordinate.beta)
                restricted = coordinate.restricted(target, coordinate.enc.counts.astype(float))
                if restricted is not None:
                    coordinate.accept(restricted)
            # Step 3: coefficient
            beta = update_betak_linear(u, coordinate.enc, coordinate.v)
            max_beta_change = max(max_beta_change, abs(beta - coordinate.beta))
            coordinate.beta = beta
            fitted = yc - u + beta * coordinate.phi
        loss = _loss(yc - fitted)
        trace.append(loss)
        logger.debug(log_message("Cycle finished", cycle=cycle, loss=loss))
        relative = (start_loss - loss) / max(start_loss, np.finfo(float).tiny)
        if relative <= tol and max_beta_change <= np.sqrt(tol):
            converged = True
            break

    notes = []
    if not converged:
        notes.append(f"not converged after {options.max_cycles} cycles")
        logger.warning(log_message("OS-regression fit did not converge", cycles=cycle, loss=loss))
    for coordinate in coordinates:
        canonical_sign(coordinate)

    logger.info(
        log_message("OS-regression fit finished", cycles=cycle, converged=converged, loss=loss)
    )
    return FittedModel(
        family="linear-os",
        response=ds.response,
        intercept=mean,
        betas=np.array([c.beta for c in coordinates]),
        quantifications=tuple(to_quantification(c) for c in coordinates),
        trace=tuple(trace),
        converged=converged,
        cycles=cycle,
        notes=tuple(notes),
        fitted=linear_predictor(mean, coordinates, ds.n),
    )
