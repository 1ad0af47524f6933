"""Single entry point from a dataset and scaling specs to a fitted model."""

import logging
from collections.abc import Mapping

from glm_optimal_scaling.data import prepare_design
from glm_optimal_scaling.dummy import fit_dummy_model
from glm_optimal_scaling.exceptions import ConfigError
from glm_optimal_scaling.families import get_family
from glm_optimal_scaling.glm_os import glm_os_fit
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import Dataset
from glm_optimal_scaling.models.fitted import FittedModel
from glm_optimal_scaling.models.schemas import Family, FitOptions, ModelType, ScalingSpec
from glm_optimal_scaling.os_linear import os_linear_fit

logger = logging.getLogger(__name__)


def fit_model(
    ds: Dataset,
    specs: Mapping[str, ScalingSpec],
    *,
    family: Family = "logistic",
    model: ModelType = "glm-os",
    min_count: int = 1,
    options: FitOptions | None = None,
) -> FittedModel:
    """Encode ``ds`` from scratch and fit the requested model to it."""
    design = prepare_design(ds, specs, min_count)
    logger.debug(log_message("Fitting model", family=family, model=model, n=ds.n, p=ds.p))
    if family == "linear-os":
        if model != "glm-os":
            raise ConfigError("dummy-logistic models need the logistic family")
        return os_linear_fit(ds, design, options)
    if model == "dummy-logistic":
        return fit_dummy_model(ds, design)
    return glm_os_fit(ds, design, options, get_family(family))
