"""`glm-os predict`: score a data file with a saved model."""

import argparse
import logging
from pathlib import Path

import pandas as pd

from glm_optimal_scaling.artifact import load_model
from glm_optimal_scaling.commands.common import (
    add_table_arguments,
    read_rows,
    separator,
    write_table,
)
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.prediction import predict

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("predict", help="predict rows of a data file")
    parser.add_argument("--model", type=Path, required=True, help="model artifact (model.json)")
    parser.add_argument("--data", type=Path, required=True, help="data file to score")
    parser.add_argument(
        "--out", type=Path, default=Path("predictions.csv"), help="output table path"
    )
    parser.add_argument("--delimiter", default=",", help="delimiter of the data file")
    parser.add_argument(
        "--missing-values",
        nargs="*",
        default=["", "NA"],
        help="cell values read as missing",
    )
    add_table_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Write one prediction per row; unseen or missing cells are flagged."""
    model = load_model(args.model)
    rows = read_rows(args.data, list(model.names), args.delimiter, args.missing_values)
    prediction = predict(model, rows)

    if model.family == "logistic":
        table = pd.DataFrame(
            {
                "row": range(1, prediction.n + 1),
                "probability": prediction.values,
                "class": prediction.classes(),
                "unseen": prediction.unseen.astype(int),
            }
        )
    else:
        table = pd.DataFrame(
            {
                "row": range(1, prediction.n + 1),
                "prediction": prediction.values,
                "unseen": prediction.unseen.astype(int),
            }
        )
    write_table(table, args.out, separator(args))
    logger.info(
        log_message(
            "Predictions written",
            path=str(args.out),
            rows=prediction.n,
            unseen_rows=int(prediction.unseen.sum()),
        )
    )
    return 0
