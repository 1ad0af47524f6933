"""Argument handling and file output shared by the subcommands."""

import argparse
import json
import logging
import re
from datetime import UTC, datetime
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from glm_optimal_scaling.data import read_table
from glm_optimal_scaling.exceptions import ConfigError, DataError
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.schemas import RunConfig

logger = logging.getLogger(__name__)


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, required=True, help="run configuration (JSON)")
    parser.add_argument("--data", type=Path, help="data file, overrides the config")
    parser.add_argument("--delimiter", help="delimiter of the data file, overrides the config")
    parser.add_argument("--out", type=Path, help="output directory, overrides the config")
    parser.add_argument(
        "--merge-min-count",
        type=int,
        help="merge categories with fewer rows than this, overrides the config",
    )


def add_table_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--tab", action="store_true", help="write tab-separated instead of comma-separated tables"
    )


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Read the JSON run configuration and apply command-line overrides.

    Raises:
        ConfigError: If the file is missing or does not validate
    """
    path: Path = args.config
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e

    if getattr(args, "data", None) is not None:
        raw["data"] = str(args.data)
    if getattr(args, "delimiter", None) is not None:
        raw["delimiter"] = args.delimiter
    if getattr(args, "out", None) is not None:
        raw["out"] = str(args.out)
    if getattr(args, "merge_min_count", None) is not None:
        raw["merge_min_count"] = args.merge_min_count
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e}") from e
    logger.info(log_message("Run configuration loaded", path=str(path), data=str(config.data)))
    return config


def separator(args: argparse.Namespace) -> str:
    return "\t" if getattr(args, "tab", False) else ","


def write_table(frame: pd.DataFrame, path: Path, sep: str = ",") -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep=sep, index=False, lineterminator="\n")
    logger.debug(log_message("Table written", path=str(path), rows=len(frame)))


def file_stem(name: str) -> str:
    """File-system safe stem for a variable name."""
    return re.sub(r"[^\w.-]+", "_", name).strip("_") or "variable"


def timestamp(enabled: bool) -> str | None:
    return datetime.now(UTC).isoformat(timespec="seconds") if enabled else None


def read_rows(
    path: Path, columns: list[str], delimiter: str, missing: list[str]
) -> dict[str, list[str | None]]:
    """Cells of ``columns`` from a delimited file, None for missing cells.

    Raises:
        DataError: If the file lacks one of ``columns``
    """
    if not path.exists():
        raise DataError(f"Data file not found: {path}")
    frame = read_table(path, delimiter, missing)
    if frame.empty and len(frame.columns) == 0:
        return {name: [] for name in columns}
    absent = [name for name in columns if name not in frame.columns]
    if absent:
        raise DataError(f"{path} lacks model column(s): {', '.join(absent)}")
    return {
        name: [None if pd.isna(cell) else str(cell) for cell in frame[name]] for name in columns
    }
