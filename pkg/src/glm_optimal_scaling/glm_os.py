"""Logistic regression with optimally scaled predictors.

The fit cycles over the intercept and then every predictor. For a
predictor it takes a Newton step on the category quantifications,
restricts and standardizes the result according to the scaling level,
recomputes the working gradient and Hessian, and takes a Newton step on
the coefficient. A step that increases the negative log-likelihood is
halved; when halving does not help, the predictor is left unchanged for
that cycle.
"""

import logging
from dataclasses import dataclass

import numpy as np

from glm_optimal_scaling.config import get_settings
from glm_optimal_scaling.coordinates import (
    ZERO_BETA,
    Coordinate,
    canonical_sign,
    initial_coordinates,
    linear_predictor,
    to_quantification,
)
from glm_optimal_scaling.data import Design
from glm_optimal_scaling.exceptions import DataError
from glm_optimal_scaling.families import (
    GlmFamily,
    LogisticFamily,
    LogisticState,
    classifies_perfectly,
)
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import Dataset, FloatArray, IntArray
from glm_optimal_scaling.models.fitted import FittedModel
from glm_optimal_scaling.models.schemas import FitOptions

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
NEAR_ZERO_CURVATURE = 1e-8


@dataclass(frozen=True)
class QuantificationStep:
    """Unrestricted Newton update of v_k and the category weights for restricting it."""

    v: FloatArray
    weights: FloatArray


def update_vk_glm(
    state: LogisticState, g: IntArray, n_categories: int, beta: float, v: FloatArray
) -> QuantificationStep | None:
    """Newton step on the quantifications of one predictor.

    Returns None when ``beta`` is zero, in which case v_k does not enter the
    likelihood and cannot be updated.
    """
    if abs(beta) < ZERO_BETA:
        return None
    grad_sums = np.bincount(g, weights=state.grad, minlength=n_categories)
    hess_sums = np.bincount(g, weights=state.hess, minlength=n_categories)
    if hess_sums.min() < NEAR_ZERO_CURVATURE:
        logger.warning(
            log_message("Near-zero category curvature", min_curvature=float(hess_sums.min()))
        )
    # (beta^2 H_c)^-1 * beta * G_c
    return QuantificationStep(v=v - grad_sums / (beta * hess_sums), weights=hess_sums)


def update_betak_glm(state: LogisticState, phi: FloatArray, beta: float) -> float:
    """Newton step on one coefficient; ``phi`` is a column of ones for the intercept."""
    return beta - float(phi @ state.grad) / float(phi @ (state.hess * phi))


def _check_binary(y: FloatArray) -> None:
    if not np.all((y == 0.0) | (y == 1.0)) or y.min() == y.max():
        raise DataError("logistic fitting needs a 0/1 response with both outcomes present")


class _Fitter:
    def __init__(
        self,
        y: FloatArray,
        coordinates: list[Coordinate],
        family: GlmFamily,
        options: FitOptions,
    ) -> None:
        self.y = y
        self.family = family
        self.halvings = options.step_halving_max
        self.intercept = family.initial_intercept(y)
        self.eta = linear_predictor(self.intercept, coordinates, len(y))
        self.nll = family.neg_loglik(self.eta, y)
        self.reverts = 0

    def _step_sizes(self) -> list[float]:
        return [0.5**h for h in range(self.halvings + 1)]

    def update_intercept(self, cycle: int) -> None:
        state = self.family.state(self.eta, self.y)
        target = update_betak_glm(state, np.ones_like(self.eta), self.intercept)
        delta = target - self.intercept
        for halving, t in enumerate(self._step_sizes()):
            eta = self.eta + t * delta
            nll = self.family.neg_loglik(eta, self.y)
            if nll <= self.nll:
                if halving:
                    logger.info(
                        log_message(
                            "Step halved", cycle=cycle, variable="(intercept)", halvings=halving
                        )
                    )
                self.intercept += t * delta
                self.eta, self.nll = eta, nll
                return
        self._revert(cycle, "(intercept)")

    def update_coordinate(self, cycle: int, coordinate: Coordinate) -> None:
        # Step 1: working derivatives at the current linear predictor
        state = self.family.state(self.eta, self.y)
        phi_old = coordinate.phi
        step = None
        if coordinate.has_restriction:
            step = update_vk_glm(
                state, coordinate.enc.g, coordinate.enc.n_categories, coordinate.beta, coordinate.v
            )
            if step is None:
                logger.debug(
                    log_message(
                        "Quantification update skipped, zero coefficient",
                        cycle=cycle,
                        variable=coordinate.name,
                    )
                )

        for halving, t in enumerate(self._step_sizes()):
            restricted = None
            v = coordinate.v
            if step is not None:
                # Step 2: restricted and standardized quantifications
                restricted = coordinate.restricted(
                    coordinate.v + t * (step.v - coordinate.v), step.weights
                )
                if restricted is None:
                    break
                v = restricted.v
            phi = v[coordinate.enc.g]
            eta_v = self.eta + coordinate.beta * (phi - phi_old)
            # Steps 3 and 4: recompute derivatives, then the coefficient
            beta_target = update_betak_glm(self.family.state(eta_v, self.y), phi, coordinate.beta)
            beta = coordinate.beta + t * (beta_target - coordinate.beta)
            eta = eta_v + (beta - coordinate.beta) * phi
            nll = self.family.neg_loglik(eta, self.y)
            if nll <= self.nll:
                if halving:
                    logger.info(
                        log_message(
                            "Step halved",
                            cycle=cycle,
                            variable=coordinate.name,
                            halvings=halving,
                        )
                    )
                if restricted is not None:
                    coordinate.accept(restricted)
                coordinate.beta = beta
                self.eta, self.nll = eta, nll
                return
        self._revert(cycle, coordinate.name)

    def _revert(self, cycle: int, name: str) -> None:
        self.reverts += 1
        logger.info(log_message("Update reverted", cycle=cycle, variable=name, negloglik=self.nll))


def glm_os_fit(
    ds: Dataset,
    design: Design,
    options: FitOptions | None = None,
    family: GlmFamily | None = None,
) -> FittedModel:
    """Fit the GLM-OS model by iteratively reweighted alternating least squares.

    Non-convergence within ``max_cycles`` is flagged on the returned model,
    not raised.

    Raises:
        DataError: If the response is not binary
    """
    options = options or FitOptions()
    family = family or LogisticFamily()
    tol = options.tol or DEFAULT_TOL
    _check_binary(ds.y)

    coordinates = initial_coordinates(design)
    fitter = _Fitter(ds.y, coordinates, family, options)
    trace = [fitter.nll]
    converged = False
    cycle = 0
    logger.info(
        log_message("GLM-OS fit started", n=ds.n, p=len(coordinates), negloglik=fitter.nll)
    )

    for cycle in range(1, options.max_cycles + 1):
        start = fitter.nll
        fitter.update_intercept(cycle)
        for coordinate in coordinates:
            fitter.update_coordinate(cycle, coordinate)
        trace.append(fitter.nll)
        logger.debug(log_message("Cycle finished", cycle=cycle, negloglik=fitter.nll))
        # Relative change, absolute once the likelihood is near perfect (separation)
        if start - fitter.nll <= tol * max(abs(start), 1.0):
            converged = True
            break

    notes = []
    if not converged:
        notes.append(f"not converged after {options.max_cycles} cycles")
        logger.warning(
            log_message("GLM-OS fit did not converge", cycles=cycle, negloglik=fitter.nll)
        )
    for coordinate in coordinates:
        if coordinate.has_restriction and abs(coordinate.beta) < ZERO_BETA:
            coordinate.flag("coefficient is zero, quantifications left at their start values")
        canonical_sign(coordinate)

    eta = linear_predictor(fitter.intercept, coordinates, ds.n)
    max_abs_eta = float(np.max(np.abs(eta)))
    if classifies_perfectly(eta, ds.y):
        notes.append(
            "complete separation: every row classified correctly, "
            f"coefficients diverge (max |eta| = {max_abs_eta:.1f})"
        )
        logger.warning(log_message("Complete separation", max_abs_eta=max_abs_eta))
    elif max_abs_eta > get_settings().max_abs_eta_warning:
        notes.append(f"possible quasi-separation: max |eta| = {max_abs_eta:.1f}")
        logger.warning(log_message("Possible quasi-separation", max_abs_eta=max_abs_eta))

    logger.info(
        log_message(
            "GLM-OS fit finished",
            cycles=cycle,
            converged=converged,
            negloglik=fitter.nll,
            intercept=round(fitter.intercept, 6),
            reverts=fitter.reverts,
        )
    )
    return FittedModel(
        family="logistic",
        response=ds.response,
        intercept=fitter.intercept,
        betas=np.array([c.beta for c in coordinates]),
        quantifications=tuple(to_quantification(c) for c in coordinates),
        trace=tuple(trace),
        converged=converged,
        cycles=cycle,
        notes=tuple(notes),
        fitted=family.inverse_link(eta),
    )
