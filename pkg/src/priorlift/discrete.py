"""Exact nonparametric prior estimation for finite-valued features.

When the feature vector takes only finitely many distinct values, the
prior is a weighted average of per-value class rates: sum_k p_k d_jk with
p_k the cell probability and d_jk the class rate at cell k. Both factors
have closed-form plug-ins from the cell counts, so no model is fit. All
arithmetic runs over exact rationals and is projected to float once at
the end.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._stats import normal_quantile
from .dataset import Dataset
from .exceptions import CoverageError, InvalidDatasetError
from .priors import _check_alpha

__all__ = ["DiscreteTable", "DiscretePriorEstimate", "tabulate", "estimate_discrete", "save_table_csv"]


@dataclass(frozen=True)
class DiscreteTable:
    """Per-value counts: labeled (M), unlabeled (N), labeled-in-class (T).

    ``values`` holds the b distinct feature vectors; ``class_counts`` is
    (c, b) with entry [j, k] counting labeled class-j rows at value k.
    Every distinct value must appear among the labeled rows.
    """

    values: np.ndarray
    labeled_counts: np.ndarray
    unlabeled_counts: np.ndarray
    class_counts: np.ndarray
    class_values: tuple[str, ...]

    def __post_init__(self):
        m = np.asarray(self.labeled_counts)
        n_u = np.asarray(self.unlabeled_counts)
        t = np.asarray(self.class_counts)
        if np.any(m < 1):
            raise CoverageError("every distinct value needs a labeled row")
        if np.any(t < 0) or np.any(t.sum(axis=0) != m):
            raise InvalidDatasetError("class counts must partition labeled counts")
        if np.any(n_u < 0):
            raise InvalidDatasetError("negative unlabeled count")

    @property
    def cell_count(self) -> int:
        return self.values.shape[0]

    @property
    def r(self) -> int:
        return int(self.labeled_counts.sum())

    @property
    def n(self) -> int:
        return int(self.labeled_counts.sum() + self.unlabeled_counts.sum())


@dataclass(frozen=True)
class DiscretePriorEstimate:
    """Prior from cell counts, with the closed-form variance plug-in."""

    class_index: int
    q_hat: float
    p_hat: tuple[float, ...]
    d_hat: tuple[float, ...]
    avar: float
    std_error: float
    ci: tuple[float, float]
    alpha: float
    avar_floored: bool

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "q_hat": self.q_hat,
            "p_hat": list(self.p_hat),
            "d_hat": list(self.d_hat),
            "avar": self.avar,
            "std_error": self.std_error,
            "ci": [self.ci[0], self.ci[1]],
            "alpha": self.alpha,
            "avar_floored": self.avar_floored,
        }


def tabulate(data: Dataset) -> DiscreteTable:
    """Count labeled/unlabeled/class occurrences of each distinct value.

    Feature vectors are compared exactly (bitwise); cells are ordered by
    first appearance. A value seen only among unlabeled rows violates the
    coverage assumption and raises CoverageError naming it.
    """
    cells: dict[bytes, int] = {}
    order = []
    for i in range(data.n):
        key = data.features[i].tobytes()
        if key not in cells:
            cells[key] = len(order)
            order.append(i)
    b = len(order)
    c = data.class_count
    labeled = np.zeros(b, dtype=np.int64)
    unlabeled = np.zeros(b, dtype=np.int64)
    per_class = np.zeros((c, b), dtype=np.int64)
    for i in range(data.n):
        k = cells[data.features[i].tobytes()]
        label = data.label_indices[i]
        if label >= 0:
            labeled[k] += 1
            per_class[label, k] += 1
        else:
            unlabeled[k] += 1
    uncovered = np.flatnonzero(labeled == 0)
    if uncovered.size:
        value = data.features[order[uncovered[0]]]
        raise CoverageError(
            f"value {tuple(value)} appears only among unlabeled rows"
        )
    return DiscreteTable(
        values=data.features[order].copy(),
        labeled_counts=labeled,
        unlabeled_counts=unlabeled,
        class_counts=per_class,
        class_values=data.class_values,
    )


def estimate_discrete(
    table: DiscreteTable, class_index: int, alpha: float = 0.05
) -> DiscretePriorEstimate:
    """Prior and variance from a count table, computed in exact rationals.

    With no unlabeled rows the point estimate collapses to the labeled
    class proportion bit-for-bit. The variance plug-in is floored at zero
    (flagged) and the confidence interval clipped to [0, 1].
    """
    _check_alpha(alpha)
    n = table.n
    b = table.cell_count
    m = table.labeled_counts
    t = table.class_counts[class_index]
    p = [Fraction(int(m[k] + table.unlabeled_counts[k]), n) for k in range(b)]
    d = [Fraction(int(t[k]), int(m[k])) for k in range(b)]

    q_exact = sum((p[k] * d[k] for k in range(b)), start=Fraction(0))

    bracket = sum(
        (d[k] * d[k] * p[k] * (1 - p[k]) for k in range(b)), start=Fraction(0)
    )
    bracket -= 2 * sum(
        (
            d[k] * d[s] * p[k] * p[s]
            for k in range(b)
            for s in range(k + 1, b)
        ),
        start=Fraction(0),
    )
    avar_exact = bracket / n
    floored = avar_exact < 0
    if floored:
        avar_exact = Fraction(0)

    q_hat = float(q_exact)
    avar = float(avar_exact)
    std_error = float(np.sqrt(avar))
    z = normal_quantile(1.0 - alpha / 2.0)
    ci = (max(0.0, q_hat - z * std_error), min(1.0, q_hat + z * std_error))
    return DiscretePriorEstimate(
        class_index=class_index,
        q_hat=q_hat,
        p_hat=tuple(float(v) for v in p),
        d_hat=tuple(float(v) for v in d),
        avar=avar,
        std_error=std_error,
        ci=ci,
        alpha=alpha,
        avar_floored=bool(floored),
    )


def save_table_csv(table: DiscreteTable, path) -> None:
    """Audit dump: one row per distinct value with M, N, and per-class T."""
    f = table.values.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        header = [f"value_{i}" for i in range(f)] + ["labeled", "unlabeled"]
        header += [f"class_{v}" for v in table.class_values]
        writer.writerow(header)
        for k in range(table.cell_count):
            row = [format(v, ".17g") for v in table.values[k]]
            row += [int(table.labeled_counts[k]), int(table.unlabeled_counts[k])]
            row += [int(table.class_counts[j, k]) for j in range(len(table.class_values))]
            writer.writerow(row)
