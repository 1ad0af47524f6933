"""`glm-os cv`: cross-validation table with one row per model variant."""

import argparse
import logging

import pandas as pd

from glm_optimal_scaling.commands.common import (
    add_config_arguments,
    add_table_arguments,
    load_run_config,
    separator,
    write_table,
)
from glm_optimal_scaling.data import load_from_config
from glm_optimal_scaling.evaluation import CvReport, cross_validate
from glm_optimal_scaling.exceptions import ConfigError, FoldError, GlmOsError
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.schemas import CvOptions, RunConfig, VariantConfig

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["model", "APE", "EPE", "SE(EPE)", "MCR(%)", "notes"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("cv", help="cross-validate every model variant of a config")
    add_config_arguments(parser)
    add_table_arguments(parser)
    parser.add_argument("--seed", type=int, help="fold assignment seed, overrides the config")
    parser.add_argument("--folds", type=int, help="number of folds, overrides the config")
    parser.add_argument(
        "--metric", choices=["brier", "deviance"], help="prediction error metric (default brier)"
    )
    parser.add_argument("--n-jobs", type=int, help="folds fitted in parallel")
    parser.set_defaults(handler=run)


def cv_options(config: RunConfig, args: argparse.Namespace) -> CvOptions:
    """Config cv section with command-line overrides; a seed is mandatory."""
    if config.cv is None and args.seed is None:
        raise ConfigError("cross-validation needs a seed: set cv.seed or pass --seed")
    options = config.cv or CvOptions(seed=args.seed)
    updates = {
        key: value
        for key, value in (
            ("seed", args.seed),
            ("folds", args.folds),
            ("metric", args.metric),
            ("n_jobs", args.n_jobs),
        )
        if value is not None
    }
    if updates.get("folds", options.folds) < 2:
        raise ConfigError("cross-validation needs at least 2 folds")
    return options.model_copy(update=updates)


def variants(config: RunConfig) -> list[VariantConfig]:
    return config.variants or [VariantConfig(label="GLM-OS")]


def report_row(
    label: str, report: CvReport | None, failure: str | None = None
) -> dict[str, object]:
    if report is None:
        return dict.fromkeys(REPORT_COLUMNS[1:-1], float("nan")) | {
            "model": label,
            "notes": f"failed: {failure}",
        }
    return {
        "model": label,
        "APE": round(report.ape, 6),
        "EPE": round(report.epe, 6),
        "SE(EPE)": round(report.se_epe, 6),
        "MCR(%)": round(report.mcr, 3),
        "notes": "; ".join(report.notes),
    }


def run(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    if config.family != "logistic":
        raise ConfigError("cross-validation is available for the logistic family only")
    options = cv_options(config, args)
    ds = load_from_config(config)

    rows = []
    fold_rows = []
    for variant in variants(config):
        specs = config.specs() | variant.levels
        logger.info(
            log_message("Cross-validating variant", variant=variant.label, seed=options.seed)
        )
        try:
            report = cross_validate(
                ds,
                specs,
                options.folds,
                options.seed,
                stratified=options.stratified,
                metric=options.metric,
                model=variant.model,
                min_count=config.merge_min_count,
                options=config.fit,
                n_jobs=options.n_jobs,
            )
        except FoldError:
            raise
        except GlmOsError as e:
            logger.warning(log_message("Variant failed", variant=variant.label, error=str(e)))
            rows.append(report_row(variant.label, None, str(e)))
            continue
        rows.append(report_row(variant.label, report))
        fold_rows += [
            {"model": variant.label, "fold": fold + 1, "error": error}
            for fold, error in enumerate(report.per_fold)
        ]

    sep = separator(args)
    table = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    write_table(table, config.out / "cv_report.csv", sep)
    write_table(
        pd.DataFrame(fold_rows, columns=["model", "fold", "error"]),
        config.out / "cv_folds.csv",
        sep,
    )
    print(table.to_string(index=False))
    return 0
