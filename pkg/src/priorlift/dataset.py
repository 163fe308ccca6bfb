"""Dataset container, CSV ingestion, and labeled/unlabeled partitioning.

A :class:`Dataset` keeps its labeled rows physically first; every estimator
in this package relies on that canonical layout when it sums over the
labeled block versus the full sample.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ConfigError,
    CsvParseError,
    DataError,
    InvalidDatasetError,
    SchemaError,
)

__all__ = [
    "Dataset",
    "LabelRule",
    "ColumnSpec",
    "Recipe",
    "RECIPES",
    "load_csv",
    "load_spec_file",
    "save_csv",
    "partition",
]

UNLABELED = -1

_RULE_OPS = {
    "le": lambda x, v: x <= v,
    "lt": lambda x, v: x < v,
    "ge": lambda x, v: x >= v,
    "gt": lambda x, v: x > v,
    "eq": None,  # compared on raw text, not parsed numbers
}


@dataclass(frozen=True)
class LabelRule:
    """Rule turning a raw label cell into a binary class (1 = rule holds).

    Numeric comparisons (le/lt/ge/gt) parse the cell as a float; ``eq``
    compares the raw text so categorical labels work unchanged.
    """

    op: str
    value: str

    def __post_init__(self):
        if self.op not in _RULE_OPS:
            raise ConfigError(f"unknown label rule op {self.op!r}")
        if self.op != "eq":
            try:
                float(self.value)
            except ValueError:
                raise ConfigError(
                    f"label rule {self.op}:{self.value} needs a numeric value"
                ) from None

    def apply(self, raw: str) -> int:
        if self.op == "eq":
            return 1 if raw == self.value else 0
        return 1 if _RULE_OPS[self.op](float(raw), float(self.value)) else 0

    def describe(self) -> str:
        return f"{self.op}:{self.value}"


@dataclass(frozen=True)
class ColumnSpec:
    """Names the feature columns and (optionally) the label column."""

    feature_columns: tuple[str, ...]
    label_column: str | None = None
    label_rule: LabelRule | None = None

    def __post_init__(self):
        object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        if not self.feature_columns:
            raise ConfigError("column spec needs at least one feature column")
        if self.label_rule is not None and self.label_column is None:
            raise ConfigError("label rule given without a label column")


@dataclass(frozen=True)
class Recipe:
    """Named column spec reproducing one of the benchmark preparations."""

    name: str
    spec: ColumnSpec
    description: str


RECIPES = {
    "pima": Recipe(
        name="pima",
        spec=ColumnSpec(("Glucose", "BMI"), "Outcome"),
        description=(
            "Pima Indians diabetes data: predict diabetes diagnosis from "
            "plasma glucose and body mass index (class 1 = diabetic)"
        ),
    ),
    "abalone": Recipe(
        name="abalone",
        spec=ColumnSpec(("Length", "Diameter"), "Rings", LabelRule("le", "9")),
        description=(
            "Abalone data: predict whether an animal has at most nine shell "
            "rings from its length and diameter (class 1 = rings <= 9)"
        ),
    ),
    "census": Recipe(
        name="census",
        spec=ColumnSpec(("age", "income"), "grad_degree"),
        description=(
            "Census-style extract: predict possession of a graduate degree "
            "from age and income (class 1 = graduate degree)"
        ),
    ),
}


def _frozen(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus per-row optional class labels.

    Rows 0..r-1 carry labels; rows r..n-1 do not. ``label_indices`` holds
    the class index per row, with -1 marking unlabeled rows.
    ``true_label_indices`` is only populated by :func:`partition` and keeps
    the pre-strip labels for evaluation harness ground truth.
    """

    features: np.ndarray
    label_indices: np.ndarray
    class_values: tuple[str, ...]
    true_label_indices: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.float64, copy=True)
        labels = np.array(self.label_indices, dtype=np.int64, copy=True)
        if feats.ndim != 2:
            raise InvalidDatasetError("features must be a 2-D matrix")
        if labels.shape != (feats.shape[0],):
            raise InvalidDatasetError("one label entry per row required")
        if not np.all(np.isfinite(feats)):
            raise InvalidDatasetError("features must be finite (no NaN/Inf)")
        r = int(np.count_nonzero(labels >= 0))
        if r == 0:
            raise InvalidDatasetError("dataset has zero labeled rows")
        if np.any(labels[:r] < 0) or np.any(labels[r:] >= 0):
            raise InvalidDatasetError(
                "labeled rows must precede unlabeled rows; "
                "use Dataset.from_arrays to canonicalize"
            )
        c = len(self.class_values)
        if c < 1 or int(labels[:r].max()) >= c:
            raise InvalidDatasetError("label index outside declared classes")
        object.__setattr__(self, "features", _frozen(feats))
        object.__setattr__(self, "label_indices", _frozen(labels))
        object.__setattr__(self, "class_values", tuple(self.class_values))
        if self.true_label_indices is not None:
            truth = np.array(self.true_label_indices, dtype=np.int64, copy=True)
            if truth.shape != labels.shape or np.any(truth < 0):
                raise InvalidDatasetError("ground-truth labels malformed")
            object.__setattr__(self, "true_label_indices", _frozen(truth))

    @classmethod
    def from_arrays(cls, features, labels, class_values=None) -> "Dataset":
        """Build a Dataset from row-aligned arrays, reordering labeled first.

        ``labels`` holds class indices with -1 (or any negative) marking
        unlabeled rows; relative order inside each block is preserved.
        """
        feats = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        order = np.argsort(labels < 0, kind="stable")
        labels = np.where(labels < 0, UNLABELED, labels)[order]
        if class_values is None:
            top = int(labels.max()) if labels.size else -1
            class_values = tuple(str(v) for v in range(top + 1))
        return cls(feats[order], labels, tuple(class_values))

    # -- basic shape -------------------------------------------------

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def r(self) -> int:
        return int(np.count_nonzero(self.label_indices >= 0))

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    @property
    def class_count(self) -> int:
        return len(self.class_values)

    @property
    def is_fully_labeled(self) -> bool:
        return self.r == self.n

    def labeled_features(self) -> np.ndarray:
        return self.features[: self.r]

    def indicator(self, class_index: int) -> np.ndarray:
        """0/1 vector over the labeled rows for membership in one class."""
        if not 0 <= class_index < self.class_count:
            raise IndexError(f"class index {class_index} out of range")
        return (self.label_indices[: self.r] == class_index).astype(np.float64)

    def indicator_matrix(self) -> np.ndarray:
        """One-hot (r, c) matrix of the labeled rows; each row sums to 1."""
        out = np.zeros((self.r, self.class_count), dtype=np.float64)
        out[np.arange(self.r), self.label_indices[: self.r]] = 1.0
        return out


def load_spec_file(path) -> ColumnSpec:
    """Read a column spec from key=value lines.

    Recognized keys: ``features`` (comma-separated), ``label``,
    ``transform`` (``op:value``). Blank lines and ``#`` comments are
    ignored.
    """
    features: tuple[str, ...] = ()
    label = None
    rule = None
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror or exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if key == "features":
            features = tuple(c.strip() for c in value.split(",") if c.strip())
        elif key == "label":
            label = value
        elif key == "transform":
            op, sep, rule_value = value.partition(":")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: transform must be op:value")
            rule = LabelRule(op.strip(), rule_value.strip())
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return ColumnSpec(features, label, rule)


def _parse_feature(cell, row_number, column):
    try:
        value = float(cell)
    except ValueError:
        raise CsvParseError(
            f"row {row_number}, column {column!r}: cannot parse {cell!r} "
            "as a number",
            row=row_number,
            column=column,
        ) from None
    if not np.isfinite(value):
        raise CsvParseError(
            f"row {row_number}, column {column!r}: non-finite value {cell!r}",
            row=row_number,
            column=column,
        )
    return value


def load_csv(path, spec: ColumnSpec) -> Dataset:
    """Read a headered CSV into a Dataset, labeled rows first.

    Rows whose label cell is empty become unlabeled; within each block the
    file order is preserved. Header matching is case-insensitive.
    """
    try:
        handle = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror or exc}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file (header row required)") from None
        positions = {}
        for i, name in enumerate(header):
            positions.setdefault(name.strip().casefold(), i)

        def locate(name):
            key = name.strip().casefold()
            if key not in positions:
                raise SchemaError(f"{path}: column {name!r} not found in header")
            return positions[key]

        feat_idx = [locate(c) for c in spec.feature_columns]
        label_idx = locate(spec.label_column) if spec.label_column else None

        feature_rows = []
        raw_labels = []
        for row_number, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}: row {row_number} has {len(row)} cells, "
                    f"header has {len(header)}"
                )
            feature_rows.append(
                [
                    _parse_feature(row[i], row_number, spec.feature_columns[k])
                    for k, i in enumerate(feat_idx)
                ]
            )
            if label_idx is None:
                raw_labels.append(None)
            else:
                cell = row[label_idx]
                raw_labels.append(cell if cell != "" else None)

    if not feature_rows:
        raise InvalidDatasetError(f"{path}: no data rows")
    features = np.array(feature_rows, dtype=np.float64)

    if spec.label_rule is not None:
        class_values = ("0", "1")
        indices = []
        for row_number, raw in enumerate(raw_labels, start=2):
            if raw is None:
                indices.append(UNLABELED)
                continue
            try:
                indices.append(spec.label_rule.apply(raw))
            except ValueError:
                raise CsvParseError(
                    f"{path}: row {row_number}: label {raw!r} not numeric, "
                    f"required by rule {spec.label_rule.describe()}",
                    row=row_number,
                    column=spec.label_column,
                ) from None
    else:
        observed = sorted({raw for raw in raw_labels if raw is not None})
        class_values = tuple(observed)
        lookup = {v: i for i, v in enumerate(observed)}
        indices = [UNLABELED if raw is None else lookup[raw] for raw in raw_labels]

    return Dataset.from_arrays(features, np.array(indices), class_values)


def save_csv(data: Dataset, path, feature_names=None, label_name="label") -> None:
    """Write a Dataset back to CSV with 17-significant-digit features.

    Reloading through :func:`load_csv` with a plain categorical spec
    reproduces every feature value bit-for-bit.
    """
    names = (
        tuple(feature_names)
        if feature_names is not None
        else tuple(f"x{i}" for i in range(data.feature_count))
    )
    if len(names) != data.feature_count:
        raise ConfigError("one name per feature column required")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(names) + [label_name])
        for i in range(data.n):
            cells = [format(v, ".17g") for v in data.features[i]]
            idx = data.label_indices[i]
            cells.append("" if idx < 0 else data.class_values[idx])
            writer.writerow(cells)


def partition(data: Dataset, r: int, seed: int) -> Dataset:
    """Keep labels on a seeded uniform subset of size r, strip the rest.

    Input must be fully labeled. The kept rows move to the front in their
    original relative order; the stripped labels are retained in
    ``true_label_indices`` so evaluation code can score against the truth.
    """
    if not data.is_fully_labeled:
        raise InvalidDatasetError("partition requires a fully labeled dataset")
    if not 1 <= r <= data.n:
        raise ConfigError(f"labeled count r={r} outside [1, {data.n}]")
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(data.n, size=r, replace=False))
    mask = np.zeros(data.n, dtype=bool)
    mask[keep] = True
    order = np.concatenate([np.flatnonzero(mask), np.flatnonzero(~mask)])
    labels = data.label_indices[order].copy()
    labels[r:] = UNLABELED
    return Dataset(
        data.features[order],
        labels,
        data.class_values,
        true_label_indices=data.label_indices[order],
    )
