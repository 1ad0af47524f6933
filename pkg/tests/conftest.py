"""Pytest fixtures for integration and unit tests."""

import json
from collections.abc import Callable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import pytest
from scipy.special import expit

from glm_optimal_scaling.config import get_settings
from glm_optimal_scaling.models.dataset import Dataset, VariableColumn
from glm_optimal_scaling.models.schemas import ColumnKind

REGION_EFFECTS = {"north": 0.0, "south": 0.5, "east": -0.5, "west": 0.2}
LEVEL_EFFECTS = np.array([-1.0, -0.2, 0.3, 0.5, 0.6])


def build_dataset(
    y: Sequence[float],
    columns: Mapping[str, tuple[ColumnKind, Sequence[Any]]],
    response: str = "y",
) -> Dataset:
    """Dataset from a response vector and name -> (kind, raw values)."""
    return Dataset(
        response=response,
        y=np.asarray(y, dtype=np.float64),
        predictors=tuple(
            VariableColumn(name=name, raw=tuple(str(value) for value in values), kind=kind)
            for name, (kind, values) in columns.items()
        ),
    )


@pytest.fixture
def make_dataset() -> Callable[..., Dataset]:
    return build_dataset


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that patch the environment need a reload."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def survey_frame() -> pd.DataFrame:
    """Synthetic survey with an S-shaped age effect, an ordinal level and a nominal region."""
    rng = np.random.default_rng(20240101)
    n = 300
    age = rng.integers(20, 50, n)
    level = rng.integers(1, 6, n)
    region = rng.choice(list(REGION_EFFECTS), n)
    smoker = rng.choice(["yes", "no"], n)
    eta = (
        -0.3
        + 0.06 * (age - 35)
        + LEVEL_EFFECTS[level - 1]
        + np.array([REGION_EFFECTS[r] for r in region])
        + 0.7 * (smoker == "yes")
    )
    y = (rng.random(n) < expit(eta)).astype(int)
    return pd.DataFrame(
        {"y": y, "age": age, "level": level, "region": region, "smoker": smoker}
    )


@pytest.fixture(scope="session")
def survey(survey_frame) -> Dataset:
    return build_dataset(
        survey_frame["y"],
        {
            "age": (ColumnKind.CONTINUOUS, survey_frame["age"]),
            "level": (ColumnKind.ORDERED, survey_frame["level"]),
            "region": (ColumnKind.UNORDERED, survey_frame["region"]),
            "smoker": (ColumnKind.BINARY, survey_frame["smoker"]),
        },
    )


@pytest.fixture(scope="session")
def categorical() -> Dataset:
    """Two unordered predictors only."""
    rng = np.random.default_rng(7)
    n = 600
    colour = rng.choice(["red", "green", "blue"], n)
    shape = rng.choice(["circle", "square", "star", "triangle"], n)
    colour_effect = {"red": 0.0, "green": 0.8, "blue": -0.4}
    shape_effect = {"circle": 0.0, "square": -0.6, "star": 0.5, "triangle": 0.2}
    eta = 0.1 + np.array([colour_effect[c] for c in colour])
    eta += np.array([shape_effect[s] for s in shape])
    y = (rng.random(n) < expit(eta)).astype(float)
    return build_dataset(
        y,
        {
            "colour": (ColumnKind.UNORDERED, colour),
            "shape": (ColumnKind.UNORDERED, shape),
        },
    )


@pytest.fixture(scope="session")
def separated() -> Dataset:
    """A binary predictor that determines the outcome."""
    x = ["a"] * 10 + ["b"] * 10
    y = [0.0] * 10 + [1.0] * 10
    return build_dataset(y, {"x": (ColumnKind.BINARY, x)})


@pytest.fixture
def write_csv(tmp_path) -> Callable[[pd.DataFrame, str], Path]:
    def write(frame: pd.DataFrame, name: str = "data.csv") -> Path:
        path = tmp_path / name
        frame.to_csv(path, index=False, lineterminator="\n")
        return path

    return write


@pytest.fixture
def survey_config() -> dict[str, Any]:
    """Run configuration for the survey data; `data` and `out` are filled in by the tests."""
    return {
        "response": "y",
        "columns": {
            "age": {
                "kind": "continuous",
                "level": "spline-monotone",
                "degree": 2,
                "interior_knots": 1,
            },
            "level": {"kind": "ordered-categorical", "level": "ordinal-step"},
            "region": {"kind": "unordered-categorical", "level": "nominal-step"},
            "smoker": {"kind": "binary", "level": "numeric"},
        },
        "cv": {"folds": 3, "seed": 11},
        "variants": [
            {
                "label": "Logistic regression (linear)",
                "model": "dummy-logistic",
                "levels": {"age": {"level": "numeric"}, "level": {"level": "numeric"}},
            },
            {
                "label": "GLM-OS (nonmonotone)",
                "levels": {
                    "age": {"level": "spline-nonmonotone", "degree": 2, "interior_knots": 1},
                    "level": {"level": "nominal-step"},
                },
            },
            {"label": "GLM-OS (monotone)"},
        ],
    }


@pytest.fixture
def survey_files(tmp_path, write_csv, survey_frame, survey_config):
    """(config path, data path, output directory) for CLI round trips."""
    data = write_csv(survey_frame, "survey.csv")
    out = tmp_path / "out"
    config = tmp_path / "survey.json"
    config.write_text(
        json.dumps(survey_config | {"data": str(data), "out": str(out)}), encoding="utf-8"
    )
    return config, data, out
