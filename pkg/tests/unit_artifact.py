"""Unit tests for the JSON model artifact and the run configuration schema."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from glm_optimal_scaling.artifact import load_model, save_model, to_artifact
from glm_optimal_scaling.exceptions import ArtifactError
from glm_optimal_scaling.models.schemas import RunConfig, ScalingLevel, ScalingSpec
from glm_optimal_scaling.pipeline import fit_model
from glm_optimal_scaling.prediction import predict

SPECS = {
    "age": ScalingSpec(level=ScalingLevel.SPLINE_MONOTONE, degree=2, interior_knots=1),
    "level": ScalingSpec(level=ScalingLevel.ORDINAL_STEP),
    "region": ScalingSpec(level=ScalingLevel.NOMINAL_STEP),
    "smoker": ScalingSpec(level=ScalingLevel.NUMERIC),
}

NEW_ROWS = {
    "age": ["20", "33.5", "49", "61"],
    "level": ["1", "3", "5", "2"],
    "region": ["north", "east", "atlantis", "west"],
    "smoker": ["yes", "no", "no", None],
}


@pytest.fixture(scope="module")
def model(survey):
    return fit_model(survey, SPECS)


@pytest.fixture
def saved(tmp_path, model):
    path = tmp_path / "model.json"
    save_model(model, path)
    return path


@pytest.mark.unit
def test_loaded_model_predicts_identically(model, saved):
    loaded = load_model(saved)

    before = predict(model, NEW_ROWS)
    after = predict(loaded, NEW_ROWS)

    np.testing.assert_allclose(after.values, before.values, rtol=1e-12)
    np.testing.assert_array_equal(after.unseen, before.unseen)
    assert loaded.names == model.names
    assert loaded.fitted is None


@pytest.mark.unit
def test_artifact_contents(model, saved):
    payload = json.loads(saved.read_text(encoding="utf-8"))

    assert payload["format_version"] == 1
    assert payload["family"] == "logistic"
    assert [v["name"] for v in payload["variables"]] == ["age", "level", "region", "smoker"]
    age = payload["variables"][0]
    assert age["spline"]["degree"] == 2
    assert len(age["v"]) == len(age["labels"]) == len(age["counts"])
    assert to_artifact(model).intercept == model.intercept


@pytest.mark.unit
def test_missing_artifact(tmp_path):
    with pytest.raises(ArtifactError, match="Cannot read"):
        load_model(tmp_path / "absent.json")


@pytest.mark.unit
def test_corrupt_artifact(tmp_path):
    path = tmp_path / "model.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ArtifactError, match="Invalid model artifact"):
        load_model(path)


@pytest.mark.unit
def test_unknown_format_version(saved):
    payload = json.loads(saved.read_text(encoding="utf-8"))
    payload["format_version"] = 2
    saved.write_text(json.dumps(payload), encoding="utf-8")

    with pytest.raises(ArtifactError):
        load_model(saved)


@pytest.mark.unit
def test_inconsistent_category_arrays(saved):
    payload = json.loads(saved.read_text(encoding="utf-8"))
    payload["variables"][2]["v"].pop()
    saved.write_text(json.dumps(payload), encoding="utf-8")

    with pytest.raises(ArtifactError, match="region"):
        load_model(saved)


# ============================================================================
# Run configuration
# ============================================================================


@pytest.mark.unit
def test_run_config_round_trip(survey_config):
    config = RunConfig.model_validate(survey_config | {"data": "survey.csv"})

    again = RunConfig.model_validate_json(config.model_dump_json())

    assert again == config
    assert again.specs()["age"].level == ScalingLevel.SPLINE_MONOTONE
    assert again.cv is not None and again.cv.stratified
    assert again.variants[0].levels["age"] == ScalingSpec(level=ScalingLevel.NUMERIC)


@pytest.mark.unit
def test_run_config_rejects_unknown_variant_column(survey_config):
    survey_config["variants"][1]["levels"]["height"] = {"level": "numeric"}

    with pytest.raises(ValidationError, match="height"):
        RunConfig.model_validate(survey_config | {"data": "survey.csv"})


@pytest.mark.unit
def test_run_config_rejects_response_as_predictor(survey_config):
    survey_config["columns"]["y"] = {"kind": "binary"}

    with pytest.raises(ValidationError, match="response"):
        RunConfig.model_validate(survey_config | {"data": "survey.csv"})
