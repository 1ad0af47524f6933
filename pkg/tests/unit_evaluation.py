"""Unit tests for fold assignment, error metrics and cross-validation."""

import numpy as np
import pytest

from glm_optimal_scaling.evaluation import (
    FoldResult,
    cross_validate,
    deviance,
    misclassifications,
    prediction_error,
    split_folds,
    summarize_folds,
)
from glm_optimal_scaling.exceptions import FoldError
from glm_optimal_scaling.models.schemas import ScalingLevel, ScalingSpec

NUMERIC = ScalingSpec(level=ScalingLevel.NUMERIC)
SURVEY_SPECS = {
    "age": ScalingSpec(level=ScalingLevel.SPLINE_MONOTONE, degree=2, interior_knots=1),
    "level": ScalingSpec(level=ScalingLevel.ORDINAL_STEP),
    "region": ScalingSpec(level=ScalingLevel.NOMINAL_STEP),
    "smoker": NUMERIC,
}


# ============================================================================
# Fold assignment
# ============================================================================


@pytest.mark.unit
def test_leave_one_out_folds():
    folds = split_folds(np.arange(10) % 2, 10, seed=3, stratified=False)

    assert sorted(folds) == list(range(10))


@pytest.mark.unit
def test_stratified_folds_keep_class_balance():
    y = np.array([0] * 25 + [1] * 25)

    folds = split_folds(y, 5, seed=1)

    for fold in range(5):
        in_fold = y[folds == fold]
        assert len(in_fold) == 10
        assert in_fold.sum() == 5


@pytest.mark.unit
def test_folds_are_deterministic_given_seed():
    y = np.random.default_rng(0).integers(0, 2, 60)

    first = split_folds(y, 4, seed=42)
    second = split_folds(y, 4, seed=42)
    other = split_folds(y, 4, seed=43)

    np.testing.assert_array_equal(first, second)
    assert not np.array_equal(first, other)
    np.testing.assert_array_equal(np.bincount(first), [15, 15, 15, 15])


@pytest.mark.unit
@pytest.mark.parametrize(
    "y, k, stratified",
    [
        ([0, 1, 0, 1], 1, False),
        ([0, 1, 0, 1], 5, False),
        ([0, 0, 0, 0, 1, 1], 3, True),
    ],
)
def test_invalid_fold_counts(y, k, stratified):
    with pytest.raises(FoldError):
        split_folds(y, k, seed=0, stratified=stratified)


# ============================================================================
# Metrics
# ============================================================================


@pytest.mark.unit
def test_prediction_error_examples():
    assert prediction_error([1.0, 0.0, 1.0], [1, 0, 1]) == 0.0
    assert prediction_error([0.5] * 4, [1, 0, 0, 1]) == pytest.approx(0.25)
    assert prediction_error([0.8, 0.3], [1, 0]) == pytest.approx(0.065)


@pytest.mark.unit
def test_prediction_error_length_mismatch():
    with pytest.raises(ValueError):
        prediction_error([0.5, 0.5], [1])


@pytest.mark.unit
def test_deviance_and_misclassifications():
    assert deviance([0.5, 0.5], [0, 1]) == pytest.approx(2 * np.log(2.0))
    assert np.isfinite(deviance([0.0, 1.0], [1, 0]))
    # probability 0.5 is classified as the positive outcome
    assert misclassifications([0.5, 0.49, 0.9, 0.1], [0, 1, 1, 1]) == 3


# ============================================================================
# Fold summaries
# ============================================================================


@pytest.mark.unit
def test_summarize_weights_by_fold_size():
    results = [
        FoldResult(fold=0, n_test=10, error=0.1, misclassified=1),
        FoldResult(fold=1, n_test=30, error=0.2, misclassified=3),
    ]

    report = summarize_folds(results, ape=0.15, apparent_mcr=8.0, seed=5, metric="brier")

    assert report.epe == pytest.approx(0.175)
    assert report.se_epe == pytest.approx(0.05)
    assert report.mcr == pytest.approx(10.0)
    assert report.per_fold == (0.1, 0.2)
    assert report.excluded == ()


@pytest.mark.unit
def test_summarize_excludes_unusable_folds():
    results = [
        FoldResult(fold=2, n_test=5, converged=False),
        FoldResult(fold=1, n_test=10, error=0.3, misclassified=2),
        FoldResult(fold=0, n_test=10, error=0.1, misclassified=1),
        FoldResult(fold=3, n_test=5, failure="single category"),
    ]

    report = summarize_folds(results, ape=0.1, apparent_mcr=5.0, seed=5, metric="brier")

    assert report.excluded == (2, 3)
    assert report.epe == pytest.approx(0.2)
    assert report.mcr == pytest.approx(15.0)
    assert report.folds == 4
    assert "excluded fold(s) 3, 4" in report.notes[0]


@pytest.mark.unit
def test_summarize_is_order_invariant():
    results = [
        FoldResult(fold=i, n_test=8 + i, error=0.1 * (i + 1), misclassified=i) for i in range(4)
    ]

    forward = summarize_folds(results, ape=0.1, apparent_mcr=1.0, seed=1, metric="brier")
    backward = summarize_folds(results[::-1], ape=0.1, apparent_mcr=1.0, seed=1, metric="brier")

    assert forward == backward


@pytest.mark.unit
def test_summarize_without_usable_folds():
    report = summarize_folds(
        [FoldResult(fold=0, n_test=4, converged=False)],
        ape=0.1,
        apparent_mcr=1.0,
        seed=1,
        metric="brier",
    )

    assert np.isnan(report.epe)
    assert np.isnan(report.mcr)


# ============================================================================
# Cross-validation
# ============================================================================


@pytest.mark.unit
def test_cross_validate_is_reproducible(survey):
    first = cross_validate(survey, SURVEY_SPECS, 3, seed=11, n_jobs=1)
    second = cross_validate(survey, SURVEY_SPECS, 3, seed=11, n_jobs=1)

    assert first == second
    assert len(first.per_fold) == 3
    assert 0.0 <= first.ape <= 0.25
    assert 0.0 < first.epe <= 0.3
    assert first.se_epe >= 0.0
    assert 0.0 <= first.mcr <= 100.0


@pytest.mark.unit
def test_cross_validate_deviance_metric(survey):
    report = cross_validate(survey, SURVEY_SPECS, 3, seed=11, metric="deviance", n_jobs=1)

    assert report.metric == "deviance"
    assert report.epe > 0.0
    assert np.isfinite(report.epe)


@pytest.mark.unit
def test_cross_validate_separated_data(separated):
    report = cross_validate(separated, {"x": NUMERIC}, 5, seed=2, n_jobs=1)

    assert report.excluded == ()
    assert report.mcr == 0.0
    assert report.apparent_mcr == 0.0
    assert report.epe < 1e-3


@pytest.mark.unit
def test_cross_validate_dummy_model(survey):
    specs = {name: NUMERIC for name in survey.names}

    report = cross_validate(survey, specs, 3, seed=11, model="dummy-logistic", n_jobs=1)

    assert report.excluded == ()
    assert 0.0 < report.epe < 0.3
