"""`glm-os plotdata`: transformation plots and their data tables."""

import argparse
import logging
from pathlib import Path

import pandas as pd

from glm_optimal_scaling.artifact import load_model
from glm_optimal_scaling.commands.common import (
    add_table_arguments,
    file_stem,
    separator,
    timestamp,
    write_table,
)
from glm_optimal_scaling.commands.fit import DISTRIBUTION_DIR
from glm_optimal_scaling.data import read_table
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.plots import distribution_svg, transformation_points, transformation_svg

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("plotdata", help="SVG transformation plots of a saved model")
    parser.add_argument("--model", type=Path, required=True, help="model artifact (model.json)")
    parser.add_argument("--out", type=Path, default=Path("plots"), help="output directory")
    parser.add_argument("--compare", type=Path, help="second model artifact to overlay")
    parser.add_argument(
        "--distributions",
        type=Path,
        help=f"category distribution tables (default: {DISTRIBUTION_DIR}/ next to the model)",
    )
    parser.add_argument(
        "--no-timestamp", action="store_true", help="omit the timestamp comment from SVG files"
    )
    add_table_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    compare = load_model(args.compare) if args.compare else None
    stamp = timestamp(not args.no_timestamp)
    distributions = args.distributions or args.model.parent / DISTRIBUTION_DIR
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for q, beta in zip(model.quantifications, model.betas, strict=True):
        rows += [{"variable": q.name, **vars(point)} for point in transformation_points(q, "fit")]
        overlay = None
        if compare is not None and q.name in compare.names:
            overlay = (compare.quantification(q.name), compare.beta(q.name))
            rows += [
                {"variable": q.name, **vars(point)}
                for point in transformation_points(overlay[0], "compare")
            ]
        stem = file_stem(q.name)
        (out / f"{stem}.svg").write_text(
            transformation_svg(q, float(beta), overlay, stamp), encoding="utf-8"
        )

        table_path = distributions / f"{stem}.csv"
        if table_path.exists():
            table = read_table(table_path, separator(args))
            if {"n_y0", "n_y1"} <= set(table.columns):
                svg = distribution_svg(
                    q.name,
                    table["category_label"].tolist(),
                    table["n_y0"].astype(int).tolist(),
                    table["n_y1"].astype(int).tolist(),
                    stamp,
                )
                (out / f"{stem}_distribution.svg").write_text(svg, encoding="utf-8")

    write_table(
        pd.DataFrame(rows, columns=["variable", "series", "x", "y", "label"]),
        out / "plotdata.csv",
        separator(args),
    )
    logger.info(log_message("Plots written", path=str(out), variables=len(model.names)))
    return 0
