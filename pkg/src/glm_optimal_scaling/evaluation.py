"""Cross-validated prediction error of GLM-OS and baseline models."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from joblib import Parallel, delayed
from sklearn.model_selection import KFold, StratifiedKFold

from glm_optimal_scaling.config import get_settings
from glm_optimal_scaling.exceptions import FoldError, GlmOsError
from glm_optimal_scaling.families import PROBABILITY_EPS
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import Dataset, IntArray
from glm_optimal_scaling.models.schemas import FitOptions, Metric, ModelType, ScalingSpec
from glm_optimal_scaling.pipeline import fit_model
from glm_optimal_scaling.prediction import CLASSIFICATION_THRESHOLD, predict

logger = logging.getLogger(__name__)


def split_folds(y: npt.ArrayLike, k: int, seed: int, stratified: bool = True) -> IntArray:
    """Fold index (0..k-1) of every row, deterministic given ``seed``.

    Raises:
        FoldError: If ``k`` is out of range or a class is too small to stratify
    """
    labels = np.asarray(y)
    n = labels.shape[0]
    if k < 2 or k > n:
        raise FoldError(f"cannot split {n} rows into {k} folds")
    if stratified:
        classes, class_counts = np.unique(labels, return_counts=True)
        if class_counts.min() < k:
            small = classes[np.argmin(class_counts)]
            raise FoldError(
                f"class {small!r} has {class_counts.min()} rows, fewer than {k} folds; "
                "lower the fold count or disable stratification"
            )
        splitter: StratifiedKFold | KFold = StratifiedKFold(
            n_splits=k, shuffle=True, random_state=seed
        )
    else:
        splitter = KFold(n_splits=k, shuffle=True, random_state=seed)

    folds = np.empty(n, dtype=np.intp)
    for fold, (_, test) in enumerate(splitter.split(np.zeros(n), labels)):
        folds[test] = fold
    return folds


def prediction_error(pi: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Brier score: mean squared difference between probabilities and outcomes."""
    p = np.asarray(pi, dtype=np.float64)
    outcome = np.asarray(y, dtype=np.float64)
    if p.shape != outcome.shape:
        raise ValueError("probabilities and outcomes differ in length")
    return float(np.mean((outcome - p) ** 2))


def deviance(pi: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Mean binomial deviance, -2/m * log-likelihood of the probabilities."""
    p = np.clip(np.asarray(pi, dtype=np.float64), PROBABILITY_EPS, 1.0 - PROBABILITY_EPS)
    outcome = np.asarray(y, dtype=np.float64)
    return float(-2.0 * np.mean(outcome * np.log(p) + (1.0 - outcome) * np.log1p(-p)))


def misclassifications(pi: npt.ArrayLike, y: npt.ArrayLike) -> int:
    predicted = np.asarray(pi) >= CLASSIFICATION_THRESHOLD
    return int(np.sum(predicted != (np.asarray(y) == 1.0)))


METRICS = {"brier": prediction_error, "deviance": deviance}


@dataclass(frozen=True)
class FoldResult:
    fold: int
    n_test: int
    error: float = float("nan")
    misclassified: int = 0
    converged: bool = True
    failure: str | None = None

    @property
    def usable(self) -> bool:
        return self.failure is None and self.converged


@dataclass(frozen=True)
class CvReport:
    """Apparent and cross-validated prediction error of one model.

    ``epe`` is the fold-size weighted mean of the usable fold errors,
    ``se_epe`` their standard deviation (divisor k - 1) over sqrt(k), and
    ``mcr`` the percentage of misclassified test rows at threshold 0.5.
    """

    ape: float
    epe: float
    se_epe: float
    mcr: float
    folds: int
    seed: int
    metric: Metric
    per_fold: tuple[float, ...]
    apparent_mcr: float = float("nan")
    excluded: tuple[int, ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)


def _run_fold(
    ds: Dataset,
    fold_of: IntArray,
    fold: int,
    specs: Mapping[str, ScalingSpec],
    model: ModelType,
    min_count: int,
    options: FitOptions | None,
    metric: Metric,
) -> FoldResult:
    train = ds.subset(np.flatnonzero(fold_of != fold))
    test = ds.subset(np.flatnonzero(fold_of == fold))
    try:
        fitted = fit_model(train, specs, model=model, min_count=min_count, options=options)
        rows = {column.name: list(column.raw) for column in test.predictors}
        pi = predict(fitted, rows).values
    except GlmOsError as e:
        logger.warning(log_message("Fold fit failed", fold=fold, error=str(e)))
        return FoldResult(fold=fold, n_test=test.n, converged=False, failure=str(e))
    return FoldResult(
        fold=fold,
        n_test=test.n,
        error=METRICS[metric](pi, test.y),
        misclassified=misclassifications(pi, test.y),
        converged=fitted.converged,
    )


def summarize_folds(
    results: list[FoldResult], *, ape: float, apparent_mcr: float, seed: int, metric: Metric
) -> CvReport:
    """Reduce fold results in fold order; non-convergent or failed folds are excluded."""
    results = sorted(results, key=lambda r: r.fold)
    usable = [r for r in results if r.usable]
    excluded = tuple(r.fold for r in results if not r.usable)
    notes = []
    if excluded:
        notes.append(
            f"excluded fold(s) {', '.join(str(f + 1) for f in excluded)}: "
            "fit failed or did not converge"
        )

    if usable:
        errors = np.array([r.error for r in usable])
        sizes = np.array([r.n_test for r in usable], dtype=np.float64)
        epe = float(sizes @ errors / sizes.sum())
        se = float(np.std(errors, ddof=1) / np.sqrt(len(errors))) if len(errors) > 1 else np.nan
        mcr = 100.0 * sum(r.misclassified for r in usable) / float(sizes.sum())
    else:
        epe = se = mcr = float("nan")
    return CvReport(
        ape=ape,
        epe=epe,
        se_epe=se,
        mcr=mcr,
        folds=len(results),
        seed=seed,
        metric=metric,
        per_fold=tuple(r.error for r in results),
        apparent_mcr=apparent_mcr,
        excluded=excluded,
        notes=tuple(notes),
    )


def cross_validate(
    ds: Dataset,
    specs: Mapping[str, ScalingSpec],
    k: int,
    seed: int,
    *,
    stratified: bool = True,
    metric: Metric = "brier",
    model: ModelType = "glm-os",
    min_count: int = 1,
    options: FitOptions | None = None,
    n_jobs: int | None = None,
) -> CvReport:
    """k-fold cross-validation of the full encode-and-fit pipeline.

    Raises:
        FoldError: If the folds cannot be assigned
    """
    n_jobs = n_jobs if n_jobs is not None else get_settings().n_jobs
    logger.info(
        log_message(
            "Cross-validation started",
            model=model,
            folds=k,
            seed=seed,
            metric=metric,
            n_jobs=n_jobs,
        )
    )
    fold_of = split_folds(ds.y, k, seed, stratified)
    full = fit_model(ds, specs, model=model, min_count=min_count, options=options)
    fitted = predict(full, {c.name: list(c.raw) for c in ds.predictors}).values
    ape = METRICS[metric](fitted, ds.y)
    apparent_mcr = 100.0 * misclassifications(fitted, ds.y) / ds.n

    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_fold)(ds, fold_of, fold, specs, model, min_count, options, metric)
        for fold in range(k)
    )
    report = summarize_folds(
        list(results), ape=ape, apparent_mcr=apparent_mcr, seed=seed, metric=metric
    )
    logger.info(
        log_message(
            "Cross-validation finished",
            model=model,
            ape=round(report.ape, 4),
            epe=round(report.epe, 4),
            se_epe=round(report.se_epe, 4),
            mcr=round(report.mcr, 2),
        )
    )
    return report

