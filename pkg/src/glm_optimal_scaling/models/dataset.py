from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .schemas import ColumnKind

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.intp]


def _frozen[T: np.generic](values: npt.ArrayLike, dtype: type[T]) -> npt.NDArray[T]:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class VariableColumn:
    name: str
    raw: tuple[str, ...]
    kind: ColumnKind
    # Explicit order for ordered columns whose labels are not numeric
    categories: tuple[str, ...] | None = None

    def __len__(self) -> int:
        return len(self.raw)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Complete-case data: response vector plus typed predictor columns."""

    response: str
    y: FloatArray
    predictors: tuple[VariableColumn, ...]
    dropped_rows: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", _frozen(self.y, np.float64))
        for column in self.predictors:
            if len(column) != self.n:
                raise ValueError(
                    f"column '{column.name}' has {len(column)} entries, expected {self.n}"
                )

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def p(self) -> int:
        return len(self.predictors)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(column.name for column in self.predictors)

    def column(self, name: str) -> VariableColumn:
        for column in self.predictors:
            if column.name == name:
                return column
        raise KeyError(name)

    def subset(self, rows: Sequence[int] | IntArray) -> "Dataset":
        """Rows ``rows`` of this dataset, in the given order."""
        index = np.asarray(rows, dtype=np.intp)
        return Dataset(
            response=self.response,
            y=self.y[index],
            predictors=tuple(
                VariableColumn(
                    name=column.name,
                    raw=tuple(column.raw[i] for i in index),
                    kind=column.kind,
                    categories=column.categories,
                )
                for column in self.predictors
            ),
        )


@dataclass(frozen=True, eq=False)
class CategoryEncoding:
    """Compact form of the indicator matrix G_k.

    ``g`` holds 0-based category indices per row; ``counts`` is the diagonal
    of D_k = G_k' G_k. ``positions`` are the numeric category values used by
    numeric and spline levels (observed values, or ranks for non-numeric
    labels). ``members`` lists the raw labels pooled into each category.
    """

    name: str
    kind: ColumnKind
    g: IntArray
    labels: tuple[str, ...]
    members: tuple[tuple[str, ...], ...]
    positions: FloatArray
    counts: IntArray
    numeric_labels: bool = False
    _lookup: dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", _frozen(self.g, np.intp))
        object.__setattr__(self, "positions", _frozen(self.positions, np.float64))
        object.__setattr__(self, "counts", _frozen(self.counts, np.intp))
        lookup: dict[str, int] = {}
        for index, labels in enumerate(self.members):
            for label in labels:
                lookup[_lookup_key(label, self.numeric_labels)] = index
        object.__setattr__(self, "_lookup", lookup)

    @property
    def n(self) -> int:
        return int(self.g.shape[0])

    @property
    def n_categories(self) -> int:
        return len(self.labels)

    @property
    def is_ordered(self) -> bool:
        return self.kind in (ColumnKind.ORDERED, ColumnKind.CONTINUOUS) or (
            self.kind == ColumnKind.BINARY and self.numeric_labels
        )

    def category_of(self, raw: str) -> int | None:
        """Category index of a raw cell value, or None when it was never observed."""
        try:
            return self._lookup.get(_lookup_key(raw, self.numeric_labels))
        except ValueError:
            return None

    def indicator_matrix(self) -> FloatArray:
        """Dense n x C_k indicator matrix (for checks on small instances)."""
        matrix = np.zeros((self.n, self.n_categories))
        matrix[np.arange(self.n), self.g] = 1.0
        return matrix


def _lookup_key(label: str, numeric: bool) -> str:
    # "3.20" and "3.2" are the same category of a numeric column
    return repr(float(label)) if numeric else label
