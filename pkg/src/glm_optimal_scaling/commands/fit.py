"""`glm-os fit`: fit a model and write its artifact, tables and log."""

import argparse
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from glm_optimal_scaling.artifact import save_model
from glm_optimal_scaling.commands.common import (
    add_config_arguments,
    add_table_arguments,
    file_stem,
    load_run_config,
    separator,
    write_table,
)
from glm_optimal_scaling.data import load_from_config
from glm_optimal_scaling.logging_config import attach_file_log, detach_file_log, log_message
from glm_optimal_scaling.models.dataset import Dataset
from glm_optimal_scaling.models.fitted import FittedModel
from glm_optimal_scaling.pipeline import fit_model

logger = logging.getLogger(__name__)

MODEL_FILE = "model.json"
LOG_FILE = "fit.log"
QUANTIFICATION_DIR = "quantifications"
DISTRIBUTION_DIR = "distributions"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("fit", help="fit a model described by a run configuration")
    add_config_arguments(parser)
    add_table_arguments(parser)
    parser.set_defaults(handler=run)


def quantification_table(model: FittedModel) -> pd.DataFrame:
    """One row per category of every predictor, in category order."""
    rows = []
    for q, beta in zip(model.quantifications, model.betas, strict=True):
        for rank, (label, value) in enumerate(zip(q.labels, q.v, strict=True), start=1):
            rows.append(
                {
                    "variable": q.name,
                    "category_label": label,
                    "original_rank": rank,
                    "quantification": float(value),
                    "beta": float(beta),
                }
            )
    return pd.DataFrame(
        rows, columns=["variable", "category_label", "original_rank", "quantification", "beta"]
    )


def distribution_table(model: FittedModel, name: str, ds: Dataset) -> pd.DataFrame:
    """Category counts of one predictor over the training rows, split by outcome."""
    enc = model.quantification(name).encoding
    table = pd.DataFrame({"category_label": list(enc.labels), "n": enc.counts.tolist()})
    if model.family == "logistic":
        table["n_y0"] = np.bincount(enc.g, weights=1.0 - ds.y, minlength=len(enc.labels))
        table["n_y1"] = np.bincount(enc.g, weights=ds.y, minlength=len(enc.labels))
        table[["n_y0", "n_y1"]] = table[["n_y0", "n_y1"]].astype(int)
    return table


def write_outputs(model: FittedModel, ds: Dataset, out: Path, sep: str) -> None:
    save_model(model, out / MODEL_FILE)
    table = quantification_table(model)
    write_table(table, out / "quantifications.csv", sep)
    for name in model.names:
        stem = file_stem(name)
        per_variable = table[table["variable"] == name]
        write_table(per_variable, out / QUANTIFICATION_DIR / f"{stem}.csv", sep)
        distribution = distribution_table(model, name, ds)
        write_table(distribution, out / DISTRIBUTION_DIR / f"{stem}.csv", sep)


def run(args: argparse.Namespace) -> int:
    """Fit the configured model.

    Writes the model artifact, the quantification tables, the category
    distribution tables and a fit log into the output directory.
    """
    config = load_run_config(args)
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    handler = attach_file_log(out / LOG_FILE)
    try:
        logger.info(log_message("Fitting model", family=config.family, data=str(config.data)))
        ds = load_from_config(config)
        model = fit_model(
            ds,
            config.specs(),
            family=config.family,
            min_count=config.merge_min_count,
            options=config.fit,
        )
        for cycle, value in enumerate(model.trace):
            logger.info(log_message("Trace", cycle=cycle, objective=value))
        for note in model.notes:
            logger.warning(log_message("Model note", note=note))
        for q in model.quantifications:
            for note in q.notes:
                logger.warning(log_message("Variable note", variable=q.name, note=note))
        logger.info(
            log_message(
                "Model fitted",
                intercept=round(model.intercept, 4),
                converged=model.converged,
                cycles=model.cycles,
            )
        )
        write_outputs(model, ds, out, separator(args))
    finally:
        detach_file_log(handler)
    print(f"model written to {out / MODEL_FILE} (intercept {model.intercept:.4f})")
    return 0
