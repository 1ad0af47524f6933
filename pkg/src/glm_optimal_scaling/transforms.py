"""Restrictions applied to unrestricted quantification estimates.

Holds the weighted standardization of quantifications, weighted monotone
regression (pool adjacent violators), the I-spline basis and the
nonnegative least squares solver used for monotone splines, and
:func:`restrict`, which routes an unrestricted estimate through the
restriction of its scaling level.
"""

import logging
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy import linalg, optimize
from scipy.interpolate import BSpline
from sklearn.isotonic import isotonic_regression

from glm_optimal_scaling.exceptions import DegenerateTransformError, SpecError
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.schemas import ScalingLevel, ScalingSpec

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
Direction = Literal["increasing", "decreasing"]

RIDGE_JITTER = 1e-10


# ============================================================================
# Standardization
# ============================================================================


@dataclass(frozen=True)
class Standardization:
    mean: float
    scale: float
    weight_total: float
    # -1 once the quantification was flipped into its canonical sign
    sign: float = 1.0

    def apply(self, values: npt.ArrayLike) -> FloatArray:
        return self.sign * (np.asarray(values, dtype=np.float64) - self.mean) / self.scale

    def invert(self, values: npt.ArrayLike) -> FloatArray:
        return self.sign * np.asarray(values, dtype=np.float64) * self.scale + self.mean

    def flipped(self) -> "Standardization":
        """The same standardization followed by a change of sign."""
        return replace(self, sign=-self.sign)


def standardize_quantification(
    v: npt.ArrayLike, weights: npt.ArrayLike, n: float | None = None
) -> tuple[FloatArray, Standardization]:
    """Z-score ``v`` with category weights (population convention, divisor ``n``).

    Raises:
        DegenerateTransformError: If the weighted variance of ``v`` is zero
    """
    values = np.asarray(v, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    total = float(w.sum())
    divisor = total if n is None else float(n)
    mean = float(w @ values / total)
    centered = values - mean
    variance = float(w @ centered**2 / divisor)
    magnitude = max(1.0, float(np.max(np.abs(values))))
    if not np.isfinite(variance) or variance <= (1e-12 * magnitude) ** 2:
        raise DegenerateTransformError(
            f"quantification has zero weighted variance (variance={variance:.3g})"
        )
    scale = float(np.sqrt(variance))
    return centered / scale, Standardization(mean=mean, scale=scale, weight_total=total)


# ============================================================================
# Weighted monotone regression
# ============================================================================


def weighted_isotonic(
    target: npt.ArrayLike, weights: npt.ArrayLike, direction: Direction = "increasing"
) -> FloatArray:
    """Weighted least squares monotone fit (pool adjacent violators)."""
    return np.asarray(
        isotonic_regression(
            np.asarray(target, dtype=np.float64),
            sample_weight=np.asarray(weights, dtype=np.float64),
            increasing=direction == "increasing",
        ),
        dtype=np.float64,
    )


# ============================================================================
# I-splines
# ============================================================================


@dataclass(frozen=True, eq=False)
class SplineBasis:
    """I-spline basis evaluated at the ordered category positions.

    ``knots`` is the full knot sequence of the degree-``degree`` B-splines
    (boundary knots repeated ``degree + 1`` times). Each I-spline is the sum
    of the B-splines from its index onwards, i.e. an integrated M-spline: it
    rises from 0 at the left boundary knot to 1 at the right one.
    """

    degree: int
    knots: FloatArray
    matrix: FloatArray

    @property
    def m(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def lower(self) -> float:
        return float(self.knots[0])

    @property
    def upper(self) -> float:
        return float(self.knots[-1])

    def evaluate(self, x: npt.ArrayLike) -> FloatArray:
        """Basis values at ``x``; constant (0 or 1) outside the boundary knots."""
        return ispline_values(np.asarray(x, dtype=np.float64), self.knots, self.degree)


def ispline_values(x: FloatArray, knots: FloatArray, degree: int) -> FloatArray:
    x = np.atleast_1d(x)
    lower, upper = float(knots[0]), float(knots[-1])
    n_bsplines = len(knots) - degree - 1
    out = np.zeros((x.shape[0], n_bsplines - 1))
    out[x >= upper] = 1.0
    inside = (x > lower) & (x < upper)
    if inside.any():
        bsplines = BSpline.design_matrix(x[inside], knots, degree).toarray()
        # Reverse cumulative sums; the first sum is identically one and is dropped
        cumulative = np.cumsum(bsplines[:, ::-1], axis=1)[:, ::-1]
        out[inside] = cumulative[:, 1:]
    return out


def ispline_basis(
    values: npt.ArrayLike,
    degree: int,
    interior_knots: int,
    weights: npt.ArrayLike | None = None,
) -> SplineBasis:
    """Build the I-spline basis over distinct ordered ``values``.

    Interior knots sit at quantiles of the row-level distribution, i.e.
    ``values`` repeated by ``weights`` (category counts). Knots that collide
    because of heavy ties are dropped with a warning.

    Raises:
        SpecError: If there are fewer than ``degree + interior_knots + 1`` values
    """
    positions = np.asarray(values, dtype=np.float64)
    if degree < 1 or interior_knots < 0:
        raise SpecError(f"invalid spline degree={degree}, interior_knots={interior_knots}")
    if positions.shape[0] < degree + interior_knots + 1:
        raise SpecError(
            f"spline of degree {degree} with {interior_knots} interior knot(s) needs at least "
            f"{degree + interior_knots + 1} distinct values, got {positions.shape[0]}"
        )
    if np.any(np.diff(positions) <= 0):
        raise SpecError("spline positions must be strictly increasing")

    lower, upper = float(positions[0]), float(positions[-1])
    row_values = (
        positions
        if weights is None
        else np.repeat(positions, np.asarray(weights, dtype=np.intp))
    )
    probabilities = np.arange(1, interior_knots + 1) / (interior_knots + 1)
    requested = np.quantile(row_values, probabilities) if interior_knots else np.array([])
    interior = np.unique(requested[(requested > lower) & (requested < upper)])
    if interior.shape[0] < interior_knots:
        logger.warning(
            log_message(
                "Duplicate spline knots removed",
                requested=interior_knots,
                kept=int(interior.shape[0]),
            )
        )

    knots = np.concatenate(
        [np.full(degree + 1, lower), interior, np.full(degree + 1, upper)]
    )
    knots.setflags(write=False)
    matrix = ispline_values(positions, knots, degree)
    matrix.setflags(write=False)
    return SplineBasis(degree=degree, knots=knots, matrix=matrix)


# ============================================================================
# Nonnegative least squares
# ============================================================================


@dataclass(frozen=True)
class NnlsResult:
    intercept: float
    coefficients: FloatArray


def _weighted_centering(
    basis: FloatArray, target: FloatArray, weights: FloatArray
) -> tuple[FloatArray, FloatArray, FloatArray, float]:
    # Profiling out the free intercept leaves a problem in the slopes only
    total = weights.sum()
    basis_mean = weights @ basis / total
    target_mean = float(weights @ target / total)
    root = np.sqrt(weights)
    return (
        root[:, None] * (basis - basis_mean),
        root * (target - target_mean),
        basis_mean,
        target_mean,
    )


def _solve_normal(gram: FloatArray, rhs: FloatArray) -> FloatArray:
    try:
        return np.asarray(linalg.solve(gram, rhs, assume_a="sym", check_finite=False))
    except (linalg.LinAlgError, ValueError):
        jitter = RIDGE_JITTER * max(1.0, float(np.max(np.abs(np.diag(gram)))))
        return np.asarray(
            linalg.solve(gram + jitter * np.eye(gram.shape[0]), rhs, assume_a="sym")
        )


def _nonnegative_slopes(a: FloatArray, b: FloatArray) -> FloatArray:
    """Solve min ||a x - b|| subject to x >= 0, ridge-stabilized on failure."""
    try:
        x, _ = optimize.nnls(a, b)
    except RuntimeError:
        n = a.shape[1]
        jitter = RIDGE_JITTER * max(1.0, float(np.max(np.sum(a * a, axis=0))))
        logger.warning(log_message("NNLS did not finish, retrying with ridge", jitter=jitter))
        x, _ = optimize.nnls(
            np.vstack([a, np.sqrt(jitter) * np.eye(n)]), np.concatenate([b, np.zeros(n)])
        )
    return np.asarray(x, dtype=np.float64)


def nnls(basis: npt.ArrayLike, target: npt.ArrayLike, weights: npt.ArrayLike) -> NnlsResult:
    """Weighted least squares with nonnegative slopes and a free intercept.

    Minimizes sum_i w_i (target_i - a0 - sum_j B_ij a_j)^2 subject to a_j >= 0.
    """
    b = np.atleast_2d(np.asarray(basis, dtype=np.float64))
    t = np.asarray(target, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    a, tc, basis_mean, target_mean = _weighted_centering(b, t, w)
    coefficients = _nonnegative_slopes(a, tc)
    return NnlsResult(
        intercept=target_mean - float(basis_mean @ coefficients), coefficients=coefficients
    )


def weighted_spline_lstsq(
    basis: FloatArray, target: FloatArray, weights: FloatArray
) -> NnlsResult:
    """Unrestricted weighted least squares on the basis plus intercept."""
    a, tc, basis_mean, target_mean = _weighted_centering(basis, target, weights)
    coefficients = _solve_normal(a.T @ a, a.T @ tc)
    return NnlsResult(
        intercept=target_mean - float(basis_mean @ coefficients), coefficients=coefficients
    )


# ============================================================================
# Restriction by scaling level
# ============================================================================


@dataclass(frozen=True)
class SplineFit:
    intercept: float
    coefficients: FloatArray


@dataclass(frozen=True)
class Restricted:
    v: FloatArray
    standardization: Standardization
    spline: SplineFit | None = None


def _weighted_sse(target: FloatArray, fitted: FloatArray, weights: FloatArray) -> float:
    return float(weights @ (target - fitted) ** 2)


def _monotone_step(target: FloatArray, weights: FloatArray) -> FloatArray:
    up = weighted_isotonic(target, weights, "increasing")
    down = weighted_isotonic(target, weights, "decreasing")
    if _weighted_sse(target, down, weights) < _weighted_sse(target, up, weights):
        return down
    return up


def _monotone_spline(basis: SplineBasis, target: FloatArray, weights: FloatArray) -> SplineFit:
    up = nnls(basis.matrix, target, weights)
    flipped = nnls(basis.matrix, -target, weights)
    down = NnlsResult(intercept=-flipped.intercept, coefficients=-flipped.coefficients)
    fitted_up = up.intercept + basis.matrix @ up.coefficients
    fitted_down = down.intercept + basis.matrix @ down.coefficients
    best = (
        down
        if _weighted_sse(target, fitted_down, weights) < _weighted_sse(target, fitted_up, weights)
        else up
    )
    return SplineFit(intercept=best.intercept, coefficients=best.coefficients)


def restrict(
    v_unrestricted: npt.ArrayLike,
    category_weights: npt.ArrayLike,
    spec: ScalingSpec,
    basis: SplineBasis | None = None,
    *,
    counts: npt.ArrayLike,
) -> Restricted:
    """Project an unrestricted estimate onto its scaling level and standardize.

    The projection is weighted by ``category_weights``; standardization always
    uses the raw category ``counts``.

    Raises:
        DegenerateTransformError: If the restricted result is constant
        SpecError: For the numeric level, or a spline level without a basis
    """
    target = np.asarray(v_unrestricted, dtype=np.float64)
    weights = np.asarray(category_weights, dtype=np.float64)
    frequencies = np.asarray(counts, dtype=np.float64)

    spline: SplineFit | None = None
    match spec.level:
        case ScalingLevel.NOMINAL_STEP:
            raw = target
        case ScalingLevel.ORDINAL_STEP:
            raw = _monotone_step(target, weights)
        case ScalingLevel.SPLINE_NONMONOTONE | ScalingLevel.SPLINE_MONOTONE:
            if basis is None:
                raise SpecError(f"{spec.level} restriction requires a spline basis")
            if spec.level == ScalingLevel.SPLINE_MONOTONE:
                spline = _monotone_spline(basis, target, weights)
            else:
                fit = weighted_spline_lstsq(basis.matrix, target, weights)
                spline = SplineFit(intercept=fit.intercept, coefficients=fit.coefficients)
            raw = spline.intercept + basis.matrix @ spline.coefficients
        case _:
            raise SpecError("numeric scaling level has no restriction step")

    v, standardization = standardize_quantification(raw, frequencies)
    return Restricted(v=v, standardization=standardization, spline=spline)
