"""Download the two UCI example datasets into data/ as CSV files with headers.

Usage: uv run python scripts/fetch_datasets.py [--dest data]
"""

import argparse
import csv
import io
import logging
import sys
from collections.abc import Callable
from pathlib import Path

import httpx

from glm_optimal_scaling.logging_config import log_message, setup_logging

logger = logging.getLogger("fetch_datasets")

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

CMC_URL = f"{UCI}/cmc/cmc.data"
CMC_HEADER = [
    "wife_age",
    "wife_education",
    "husband_education",
    "number_of_children",
    "wife_religion",
    "wife_working",
    "husband_occupation",
    "standard_of_living",
    "media_exposure",
    "uses_contraception",
]

BREAST_CANCER_URL = f"{UCI}/breast-cancer/breast-cancer.data"
BREAST_CANCER_HEADER = [
    "class",
    "age",
    "menopause",
    "tumor_size",
    "inv_nodes",
    "node_caps",
    "deg_malig",
    "breast",
    "breast_quad",
    "irradiat",
]


def cmc_row(fields: list[str]) -> list[str]:
    # Method 1 is "no use"; long- and short-term use are pooled
    *predictors, method = fields
    return [*predictors, "0" if method.strip() == "1" else "1"]


def breast_cancer_row(fields: list[str]) -> list[str]:
    return [field.strip() for field in fields]


def convert(text: str, header: list[str], row: Callable[[list[str]], list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for fields in csv.reader(io.StringIO(text)):
        if not fields:
            continue
        if len(fields) != len(header):
            raise ValueError(f"expected {len(header)} fields, got {len(fields)}: {fields}")
        writer.writerow(row(fields))
    return out.getvalue()


def fetch(client: httpx.Client, url: str) -> str:
    response = client.get(url)
    response.raise_for_status()
    return response.text


def main(argv: list[str] | None = None) -> int:
    setup_logging()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", type=Path, default=Path("data"))
    args = parser.parse_args(argv)
    args.dest.mkdir(parents=True, exist_ok=True)

    targets = [
        (CMC_URL, CMC_HEADER, cmc_row, "cmc.csv"),
        (BREAST_CANCER_URL, BREAST_CANCER_HEADER, breast_cancer_row, "breast_cancer.csv"),
    ]
    try:
        with httpx.Client(timeout=30.0, follow_redirects=True) as client:
            for url, header, row, name in targets:
                path = args.dest / name
                path.write_text(convert(fetch(client, url), header, row), encoding="utf-8")
                logger.info(log_message("Dataset written", url=url, path=str(path)))
    except (httpx.HTTPError, ValueError) as e:
        logger.error(log_message("Download failed", error=str(e)))
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
