"""Integration tests for the glm-os command line.

Every test drives `main()` with real files in a temporary directory.
"""

import json

import numpy as np
import pandas as pd
import pytest

from glm_optimal_scaling.main import main
from glm_optimal_scaling.models.schemas import ScalingLevel, ScalingSpec
from glm_optimal_scaling.pipeline import fit_model

SURVEY_SPECS = {
    "age": ScalingSpec(level=ScalingLevel.SPLINE_MONOTONE, degree=2, interior_knots=1),
    "level": ScalingSpec(level=ScalingLevel.ORDINAL_STEP),
    "region": ScalingSpec(level=ScalingLevel.NOMINAL_STEP),
    "smoker": ScalingSpec(level=ScalingLevel.NUMERIC),
}


def write_config(tmp_path, config, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


def predict_args(model, data, out):
    return ["predict", "--model", str(model), "--data", str(data), "--out", str(out)]


@pytest.fixture
def fitted(survey_files):
    """Paths after a successful `glm-os fit` on the survey data."""
    config, data, out = survey_files
    assert main(["fit", "--config", str(config)]) == 0
    return config, data, out


# ============================================================================
# fit
# ============================================================================


@pytest.mark.integration
def test_fit_writes_outputs(fitted):
    """Integration test: artifact, tables and fit log land in the output directory."""
    _, _, out = fitted

    assert (out / "model.json").exists()
    table = pd.read_csv(out / "quantifications.csv")
    assert list(table.columns) == [
        "variable",
        "category_label",
        "original_rank",
        "quantification",
        "beta",
    ]
    assert list(table["variable"].unique()) == ["age", "level", "region", "smoker"]
    assert list(table.loc[table["variable"] == "level", "original_rank"]) == [1, 2, 3, 4, 5]
    for name in ("age", "level", "region", "smoker"):
        assert (out / "quantifications" / f"{name}.csv").exists()
        distribution = pd.read_csv(out / "distributions" / f"{name}.csv")
        assert (distribution["n_y0"] + distribution["n_y1"] == distribution["n"]).all()
    log = (out / "fit.log").read_text(encoding="utf-8")
    assert "Trace" in log
    assert "Model fitted" in log


@pytest.mark.integration
def test_fit_tab_separated_tables(survey_files):
    config, _, out = survey_files

    assert main(["fit", "--config", str(config), "--tab"]) == 0

    header = (out / "quantifications.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.split("\t")[:2] == ["variable", "category_label"]


@pytest.mark.integration
def test_fit_reads_tab_separated_data(tmp_path, survey_frame, survey_config):
    data = tmp_path / "survey.tsv"
    survey_frame.to_csv(data, sep="\t", index=False, lineterminator="\n")
    out = tmp_path / "out"
    config = write_config(tmp_path, survey_config | {"data": str(data), "out": str(out)})

    assert main(["fit", "--config", str(config), "--delimiter", "\t"]) == 0

    assert (out / "model.json").exists()


@pytest.mark.integration
def test_fit_unknown_column(tmp_path, survey_files, survey_config, capsys):
    _, data, out = survey_files
    survey_config["columns"]["height"] = {"kind": "continuous"}
    config = write_config(tmp_path, survey_config | {"data": str(data), "out": str(out)})

    status = main(["fit", "--config", str(config)])

    assert status == 2
    assert "height" in capsys.readouterr().err


@pytest.mark.integration
def test_fit_invalid_json(tmp_path, capsys):
    config = tmp_path / "broken.json"
    config.write_text("{", encoding="utf-8")

    assert main(["fit", "--config", str(config)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


@pytest.mark.integration
def test_fit_missing_data_file(tmp_path, survey_config):
    config = write_config(
        tmp_path,
        survey_config | {"data": str(tmp_path / "absent.csv"), "out": str(tmp_path / "out")},
    )

    assert main(["fit", "--config", str(config)]) == 2


# ============================================================================
# predict
# ============================================================================


@pytest.mark.integration
def test_predict_reproduces_fitted_values(fitted, tmp_path, survey):
    _, data, out = fitted
    predictions = tmp_path / "predictions.csv"

    status = main(predict_args(out / "model.json", data, predictions))

    assert status == 0
    table = pd.read_csv(predictions)
    assert list(table.columns) == ["row", "probability", "class", "unseen"]
    expected = fit_model(survey, SURVEY_SPECS).fitted
    np.testing.assert_allclose(table["probability"], expected, rtol=1e-9)
    np.testing.assert_array_equal(table["class"], (expected >= 0.5).astype(int))
    assert table["unseen"].sum() == 0


@pytest.mark.integration
def test_predict_flags_unseen_categories(fitted, tmp_path, write_csv):
    _, _, out = fitted
    rows = pd.DataFrame(
        {
            "age": [30, 41],
            "level": [2, 4],
            "region": ["mars", "north"],
            "smoker": ["yes", None],
        }
    )
    data = write_csv(rows, "new.csv")
    predictions = tmp_path / "new_predictions.csv"

    status = main(predict_args(out / "model.json", data, predictions))

    assert status == 0
    table = pd.read_csv(predictions)
    assert list(table["unseen"]) == [1, 1]
    assert table["probability"].between(0.0, 1.0).all()


@pytest.mark.integration
def test_predict_empty_file(fitted, tmp_path):
    _, _, out = fitted
    data = tmp_path / "empty.csv"
    data.write_text("", encoding="utf-8")
    predictions = tmp_path / "empty_predictions.csv"

    status = main(predict_args(out / "model.json", data, predictions))

    assert status == 0
    assert predictions.read_text(encoding="utf-8") == "row,probability,class,unseen\n"


@pytest.mark.integration
def test_predict_corrupt_model(tmp_path, survey_files):
    _, data, _ = survey_files
    model = tmp_path / "model.json"
    model.write_text('{"format_version": 1}', encoding="utf-8")

    status = main(["predict", "--model", str(model), "--data", str(data)])

    assert status == 1


@pytest.mark.integration
def test_linear_os_predictions(tmp_path, write_csv, survey_frame, survey_config):
    frame = survey_frame.drop(columns="y")
    frame["score"] = 0.1 * survey_frame["age"] + survey_frame["level"] ** 0.5
    data = write_csv(frame, "scores.csv")
    survey_config.pop("variants")
    config = write_config(
        tmp_path,
        survey_config
        | {"response": "score", "family": "linear-os"}
        | {"data": str(data), "out": str(tmp_path / "lin")},
    )
    predictions = tmp_path / "lin_predictions.csv"

    assert main(["fit", "--config", str(config)]) == 0
    status = main(predict_args(tmp_path / "lin" / "model.json", data, predictions))

    assert status == 0
    table = pd.read_csv(predictions)
    assert list(table.columns) == ["row", "prediction", "unseen"]
    residual = table["prediction"] - frame["score"]
    assert np.abs(residual).max() < 0.5


# ============================================================================
# cv
# ============================================================================


@pytest.mark.integration
def test_cv_report_has_one_row_per_variant(survey_files):
    config, _, out = survey_files

    assert main(["cv", "--config", str(config)]) == 0

    report = pd.read_csv(out / "cv_report.csv")
    assert list(report["model"]) == [
        "Logistic regression (linear)",
        "GLM-OS (nonmonotone)",
        "GLM-OS (monotone)",
    ]
    assert np.isfinite(report[["APE", "EPE", "SE(EPE)", "MCR(%)"]].to_numpy()).all()
    folds = pd.read_csv(out / "cv_folds.csv")
    assert len(folds) == 9


@pytest.mark.integration
def test_cv_is_reproducible(survey_files, tmp_path):
    config, _, _ = survey_files
    first, second = tmp_path / "first", tmp_path / "second"

    assert main(["cv", "--config", str(config), "--out", str(first)]) == 0
    assert main(["cv", "--config", str(config), "--out", str(second)]) == 0

    assert (first / "cv_report.csv").read_text() == (second / "cv_report.csv").read_text()


@pytest.mark.integration
def test_cv_requires_a_seed(tmp_path, survey_files, survey_config, capsys):
    _, data, out = survey_files
    survey_config.pop("cv")
    config = write_config(tmp_path, survey_config | {"data": str(data), "out": str(out)})

    assert main(["cv", "--config", str(config)]) == 2
    assert "seed" in capsys.readouterr().err


@pytest.mark.integration
def test_cv_on_six_rows(tmp_path, write_csv):
    """Integration test: two folds of three rows still give finite numbers."""
    data = write_csv(pd.DataFrame({"x": [1, 2, 3, 4, 5, 6], "y": [0, 1, 0, 1, 1, 0]}), "six.csv")
    config = write_config(
        tmp_path,
        {
            "data": str(data),
            "response": "y",
            "columns": {"x": {"kind": "continuous", "level": "numeric"}},
            "cv": {"folds": 2, "seed": 1},
            "out": str(tmp_path / "six"),
        },
    )

    assert main(["cv", "--config", str(config)]) == 0

    report = pd.read_csv(tmp_path / "six" / "cv_report.csv")
    assert list(report["model"]) == ["GLM-OS"]
    assert np.isfinite(report[["APE", "EPE", "MCR(%)"]].to_numpy()).all()


# ============================================================================
# plotdata
# ============================================================================


@pytest.mark.integration
def test_plotdata_is_deterministic(fitted, tmp_path):
    _, _, out = fitted
    first, second = tmp_path / "plots1", tmp_path / "plots2"

    for target in (first, second):
        status = main(
            ["plotdata", "--model", str(out / "model.json"), "--out", str(target), "--no-timestamp"]
        )
        assert status == 0

    for name in ("age", "level", "region", "smoker"):
        assert (first / f"{name}.svg").read_bytes() == (second / f"{name}.svg").read_bytes()
        assert (first / f"{name}_distribution.svg").exists()
    table = pd.read_csv(first / "plotdata.csv")
    assert set(table["series"]) == {"fit", "fit-spline"}
    assert "<!--" not in (first / "age.svg").read_text(encoding="utf-8")


@pytest.mark.integration
def test_plotdata_compare_overlay(fitted, tmp_path, survey_config):
    config, data, out = fitted
    survey_config["columns"]["level"]["level"] = "nominal-step"
    nominal = write_config(
        tmp_path,
        survey_config | {"data": str(data), "out": str(tmp_path / "nominal")},
        "nominal.json",
    )
    assert main(["fit", "--config", str(nominal)]) == 0
    plots = tmp_path / "compare"

    status = main(
        [
            "plotdata",
            "--model",
            str(out / "model.json"),
            "--compare",
            str(tmp_path / "nominal" / "model.json"),
            "--out",
            str(plots),
        ]
    )

    assert status == 0
    svg = (plots / "level.svg").read_text(encoding="utf-8")
    assert svg.count('width="8" height="8"') == 5
    assert "<!-- generated" in svg
    assert "compare" in set(pd.read_csv(plots / "plotdata.csv")["series"])
