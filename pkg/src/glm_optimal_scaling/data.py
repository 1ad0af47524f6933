"""Ingestion, category encoding and scaling-spec validation."""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from glm_optimal_scaling.exceptions import ConfigError, DataError, EncodingError, SpecError
from glm_optimal_scaling.logging_config import log_message
from glm_optimal_scaling.models.dataset import CategoryEncoding, Dataset, VariableColumn
from glm_optimal_scaling.models.schemas import (
    ColumnConfig,
    ColumnKind,
    Family,
    RunConfig,
    ScalingLevel,
    ScalingSpec,
)
from glm_optimal_scaling.transforms import SplineBasis, ispline_basis

logger = logging.getLogger(__name__)

MERGED_LABEL_SEPARATOR = "|"


# ============================================================================
# Ingestion
# ============================================================================


def read_table(
    path: Path, delimiter: str = ",", missing_values: Sequence[str] = ("", "NA")
) -> pd.DataFrame:
    """Read a delimited UTF-8 file with a header row, every cell as a string.

    Raises:
        DataError: If the file cannot be read
    """
    try:
        return pd.read_csv(
            path,
            sep=delimiter,
            dtype=str,
            encoding="utf-8",
            keep_default_na=False,
            na_values=list(missing_values),
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame()
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        logger.error(log_message("Failed to read data file", path=str(path), error=str(e)))
        raise DataError(f"Cannot read data file {path}: {e}") from e


def _parse_response(
    values: pd.Series, response: str, family: Family, positive_label: str | None
) -> np.ndarray:
    if positive_label is not None:
        y = (values == positive_label).to_numpy(dtype=np.float64)
    else:
        try:
            y = values.astype(np.float64).to_numpy()
        except ValueError as e:
            raise DataError(f"response '{response}' is not numeric: {e}") from e
    if not np.all(np.isfinite(y)):
        raise DataError(f"response '{response}' contains non-finite values")
    if family == "logistic":
        if not np.all((y == 0.0) | (y == 1.0)):
            raise DataError(
                f"response '{response}' must be binary (0/1) for the logistic family; "
                "set `positive_label` to map string outcomes"
            )
        if y.min() == y.max():
            raise DataError(f"response '{response}' contains only one outcome value")
    return y


def load_dataset(
    path: Path,
    schema: Mapping[str, ColumnConfig],
    response: str,
    *,
    family: Family = "logistic",
    delimiter: str = ",",
    missing_values: Sequence[str] = ("", "NA"),
    positive_label: str | None = None,
) -> Dataset:
    """Load a delimited file into a complete-case Dataset.

    Rows with a missing value in the response or any declared predictor are
    dropped (listwise deletion); the number dropped is logged and kept on
    the Dataset.

    Raises:
        DataError: On unreadable files, bad response values or zero remaining rows
        ConfigError: If the response or a declared column is absent from the file
    """
    if not Path(path).exists():
        raise DataError(f"Data file not found: {path}")
    frame = read_table(path, delimiter, missing_values)

    used = [response, *schema]
    for name in used:
        if name not in frame.columns:
            raise ConfigError(f"Column '{name}' not found in data file {path}")

    complete = frame[used].dropna(axis=0, how="any")
    dropped = len(frame) - len(complete)
    if dropped:
        logger.info(log_message("Listwise deletion", rows_dropped=dropped, path=str(path)))
    if complete.empty:
        raise DataError(f"No complete rows left in {path} after listwise deletion")

    y = _parse_response(complete[response], response, family, positive_label)
    predictors = []
    for name, column in schema.items():
        raw = tuple(str(value) for value in complete[name])
        if column.kind == ColumnKind.CONTINUOUS:
            _parse_numeric(raw, name)
        predictors.append(
            VariableColumn(
                name=name,
                raw=raw,
                kind=column.kind,
                categories=tuple(column.categories) if column.categories else None,
            )
        )

    dataset = Dataset(response=response, y=y, predictors=tuple(predictors), dropped_rows=dropped)
    logger.info(
        log_message(
            "Dataset loaded", path=str(path), n=dataset.n, p=dataset.p, rows_dropped=dropped
        )
    )
    return dataset


def load_from_config(config: RunConfig) -> Dataset:
    return load_dataset(
        config.data,
        config.columns,
        config.response,
        family=config.family,
        delimiter=config.delimiter,
        missing_values=config.missing_values,
        positive_label=config.positive_label,
    )


def _parse_numeric(raw: Sequence[str], name: str) -> np.ndarray:
    try:
        values = np.array([float(value) for value in raw], dtype=np.float64)
    except ValueError as e:
        raise DataError(f"column '{name}' has a non-numeric value: {e}") from e
    if not np.all(np.isfinite(values)):
        raise DataError(f"column '{name}' has non-finite values")
    return values


def _all_numeric(labels: Sequence[str]) -> bool:
    try:
        return all(math.isfinite(float(label)) for label in labels)
    except ValueError:
        return False


# ============================================================================
# Category encoding
# ============================================================================


def encode_categories(column: VariableColumn) -> CategoryEncoding:
    """Encode a column as category indices plus per-category counts.

    Ordering rule: ordered and continuous columns sort by value (or by the
    declared ``categories`` order), binary columns sort numeric labels by
    value, everything else keeps first-appearance order.

    Raises:
        EncodingError: If fewer than two distinct levels are observed
        SpecError: If an ordered column has non-numeric labels and no declared order
    """
    first_seen: dict[str, str] = {}
    numeric_labels = False
    if column.kind == ColumnKind.CONTINUOUS or (
        column.kind in (ColumnKind.ORDERED, ColumnKind.BINARY)
        and column.categories is None
        and _all_numeric(column.raw)
    ):
        numeric_labels = True
        for label in column.raw:
            first_seen.setdefault(repr(float(label)), label)
        ordered_keys = sorted(first_seen, key=float)
        positions = [float(key) for key in ordered_keys]
        key_of = {key: index for index, key in enumerate(ordered_keys)}
        g = [key_of[repr(float(label))] for label in column.raw]
        labels = [first_seen[key] for key in ordered_keys]
    else:
        for label in column.raw:
            first_seen.setdefault(label, label)
        if column.kind == ColumnKind.ORDERED:
            if column.categories is None:
                raise SpecError(
                    f"ordered column '{column.name}' has non-numeric labels; "
                    "declare `categories` to fix their order"
                )
            unknown = sorted(set(first_seen) - set(column.categories))
            if unknown:
                raise EncodingError(
                    f"column '{column.name}' has labels outside its declared categories: "
                    f"{', '.join(unknown)}"
                )
            labels = [label for label in column.categories if label in first_seen]
        else:
            labels = list(first_seen)
        key_of = {label: index for index, label in enumerate(labels)}
        g = [key_of[label] for label in column.raw]
        positions = [float(index + 1) for index in range(len(labels))]

    if len(labels) < 2:
        raise EncodingError(
            f"column '{column.name}' needs at least 2 distinct levels, found {len(labels)}"
        )

    return CategoryEncoding(
        name=column.name,
        kind=column.kind,
        g=np.asarray(g, dtype=np.intp),
        labels=tuple(labels),
        members=tuple((label,) for label in labels),
        positions=np.asarray(positions, dtype=np.float64),
        counts=np.bincount(np.asarray(g, dtype=np.intp), minlength=len(labels)),
        numeric_labels=numeric_labels,
    )


def _merge_partner(counts: np.ndarray, rare: int, ordered: bool) -> int:
    if ordered:
        if rare == 0:
            return 1
        if rare == len(counts) - 1:
            return rare - 1
        # Adjacent category with the smaller count; ties merge leftward
        return rare - 1 if counts[rare - 1] <= counts[rare + 1] else rare + 1
    others = [c for c in range(len(counts)) if c != rare]
    return max(others, key=lambda c: (counts[c], -c))


def merge_rare_categories(
    enc: CategoryEncoding, min_count: int, kind: ColumnKind | None = None
) -> CategoryEncoding:
    """Merge categories with fewer than ``min_count`` rows into a neighbor.

    Ordered columns merge with the adjacent category of smaller count;
    unordered columns merge into the modal category. The rarest category is
    merged first and the procedure repeats until every count reaches
    ``min_count``.

    Raises:
        EncodingError: If merging would leave fewer than two categories
    """
    if min_count <= 1:
        return enc
    if min_count >= enc.n:
        raise EncodingError(f"min_count={min_count} must be below the row count {enc.n}")
    kind = kind or enc.kind
    ordered = kind in (ColumnKind.ORDERED, ColumnKind.CONTINUOUS) or (
        kind == ColumnKind.BINARY and enc.numeric_labels
    )

    members = [list(m) for m in enc.members]
    counts = enc.counts.astype(np.intp).tolist()
    positions = enc.positions.tolist()
    g = enc.g.copy()

    while min(counts) < min_count:
        if len(counts) <= 2:
            raise EncodingError(
                f"merging rare categories of '{enc.name}' would leave fewer than 2 categories"
            )
        rare = min(range(len(counts)), key=lambda c: (counts[c], c))
        partner = _merge_partner(np.asarray(counts), rare, ordered)
        keep, drop = (min(rare, partner), max(rare, partner)) if ordered else (partner, rare)
        total = counts[keep] + counts[drop]
        positions[keep] = (counts[keep] * positions[keep] + counts[drop] * positions[drop]) / total
        members[keep] = (
            members[keep] + members[drop] if keep < drop else members[drop] + members[keep]
        )
        counts[keep] = total
        del counts[drop], positions[drop], members[drop]
        g = np.where(g == drop, keep, g)
        g = np.where(g > drop, g - 1, g)
        logger.info(
            log_message(
                "Merged rare category",
                variable=enc.name,
                merged=MERGED_LABEL_SEPARATOR.join(members[keep if keep < drop else keep - 1]),
                count=total,
            )
        )
    if not ordered:
        # Unordered positions are ranks; keep them distinct after merging
        positions = [float(index + 1) for index in range(len(counts))]

    return CategoryEncoding(
        name=enc.name,
        kind=enc.kind,
        g=g,
        labels=tuple(MERGED_LABEL_SEPARATOR.join(m) for m in members),
        members=tuple(tuple(m) for m in members),
        positions=np.asarray(positions, dtype=np.float64),
        counts=np.asarray(counts, dtype=np.intp),
        numeric_labels=enc.numeric_labels,
    )


# ============================================================================
# Scaling spec validation
# ============================================================================


def validate_spec(
    spec: ScalingSpec, enc: CategoryEncoding, kind: ColumnKind | None = None
) -> tuple[ScalingSpec, str | None]:
    """Check a scaling spec against its encoded column.

    Returns the (possibly downgraded) spec and a note describing any change.
    Binary predictors are downgraded to the numeric level, which yields the
    same quantifications at less cost.

    Raises:
        SpecError: For monotone or spline levels on unordered data, or an
            infeasible spline
    """
    kind = kind or enc.kind
    if kind == ColumnKind.UNORDERED and spec.level != ScalingLevel.NUMERIC:
        if spec.is_monotone or spec.is_spline:
            raise SpecError(
                f"{spec.level} scaling level requires ordered data, "
                f"but '{enc.name}' is unordered-categorical"
            )

    if enc.n_categories == 2 and spec.level != ScalingLevel.NUMERIC:
        note = f"binary predictor: {spec.level} scaling level downgraded to numeric"
        logger.info(log_message("Scaling level downgraded", variable=enc.name, note=note))
        return spec.model_copy(update={"level": ScalingLevel.NUMERIC}), note

    if spec.is_spline:
        needed = spec.degree + spec.interior_knots + 1
        if enc.n_categories < needed:
            raise SpecError(
                f"'{enc.name}' has {enc.n_categories} categories; a degree-{spec.degree} spline "
                f"with {spec.interior_knots} interior knot(s) needs at least {needed}"
            )
    return spec, None


# ============================================================================
# Design preparation
# ============================================================================


@dataclass(frozen=True)
class Design:
    """Encoded predictors with checked specs, ready for fitting."""

    encodings: dict[str, CategoryEncoding]
    specs: dict[str, ScalingSpec]
    bases: dict[str, SplineBasis] = field(default_factory=dict)
    notes: dict[str, list[str]] = field(default_factory=dict)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.encodings)


def prepare_design(
    ds: Dataset, specs: Mapping[str, ScalingSpec], min_count: int = 1
) -> Design:
    """Encode, merge and validate every predictor of ``ds``.

    Raises:
        ConfigError: If a predictor has no scaling spec
    """
    encodings: dict[str, CategoryEncoding] = {}
    checked: dict[str, ScalingSpec] = {}
    bases: dict[str, SplineBasis] = {}
    notes: dict[str, list[str]] = {}
    for column in ds.predictors:
        if column.name not in specs:
            raise ConfigError(f"No scaling spec declared for column '{column.name}'")
        encoded = encode_categories(column)
        enc = merge_rare_categories(encoded, min_count)
        spec, note = validate_spec(specs[column.name], enc)
        encodings[column.name] = enc
        checked[column.name] = spec
        notes[column.name] = [note] if note else []
        if enc.n_categories < encoded.n_categories:
            notes[column.name].append("rare categories merged")
        if spec.is_spline:
            bases[column.name] = ispline_basis(
                enc.positions, spec.degree, spec.interior_knots, weights=enc.counts
            )
    return Design(encodings=encodings, specs=checked, bases=bases, notes=notes)
