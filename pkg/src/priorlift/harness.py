"""Subsample mean-squared-error benchmark.

Treats a fully labeled sample of size h as the population, then repeatedly
draws subsamples of size s = r + u without replacement, strips labels from
u rows, and measures each estimator's squared deviation from the
full-sample class proportion. Reported per (r, u) cell is the estimated
MSE of the semi-supervised and classical estimators plus their ratio.

Every replicate owns a counter-based random stream keyed by
(seed, cell index, replicate index), and per-cell reductions run in
replicate order over exactly-rounded sums, so results are bit-identical
no matter how the replicates are scheduled across threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._stats import exact_sum
from .dataset import UNLABELED, Dataset
from .exceptions import ConfigError, EstimationError, InvalidDatasetError
from .logistic import fit_class
from .priors import classical_prior, estimate_prior

__all__ = [
    "SEMI_SUPERVISED",
    "CLASSICAL",
    "SubsampleConfig",
    "MseCell",
    "MseCurve",
    "run_grid",
    "smooth_curve",
]

SEMI_SUPERVISED = "semi-supervised"
CLASSICAL = "classical"
MIN_LABELED = 20
DEFAULT_REPLICATES = 1000


@dataclass(frozen=True)
class SubsampleConfig:
    """Grid of (labeled, unlabeled) cell sizes plus replication settings."""

    grid: tuple[tuple[int, int], ...]
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    estimators: tuple[str, ...] = (SEMI_SUPERVISED, CLASSICAL)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple((int(r), int(u)) for r, u in self.grid))
        object.__setattr__(self, "estimators", tuple(sorted(set(self.estimators))))
        if not self.grid:
            raise ConfigError("empty evaluation grid")
        if self.replicates < 1:
            raise ConfigError("replicate count must be at least 1")
        for r, u in self.grid:
            if r < MIN_LABELED:
                raise ConfigError(f"cell ({r}, {u}): need at least {MIN_LABELED} labeled rows")
            if u < 0:
                raise ConfigError(f"cell ({r}, {u}): negative unlabeled count")
        unknown = set(self.estimators) - {SEMI_SUPERVISED, CLASSICAL}
        if unknown:
            raise ConfigError(f"unknown estimators: {sorted(unknown)}")


@dataclass(frozen=True)
class MseCell:
    r: int
    n_minus_r: int
    mse_semi: float | None
    mse_classical: float | None
    ratio: float | None
    replicates_used: int
    failures: int
    valid: bool = True

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "n_minus_r": self.n_minus_r,
            "mse_semi": self.mse_semi,
            "mse_classical": self.mse_classical,
            "ratio": self.ratio,
            "replicates_used": self.replicates_used,
            "failures": self.failures,
            "valid": self.valid,
        }


@dataclass(frozen=True)
class MseCurve:
    cells: tuple[MseCell, ...]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "cells": [cell.to_dict() for cell in self.cells],
        }


def semi_supervised_point(sub: Dataset, class_index: int) -> float:
    fit = fit_class(sub, class_index)
    return estimate_prior(sub, fit, class_index).q_hat


def classical_point(sub: Dataset, class_index: int) -> float:
    return classical_prior(sub, class_index).q_hat


def _thread_budget(requested: int | None) -> int:
    count = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("PRIOR_LIFT_THREADS")
    if cap is not None:
        try:
            count = min(count, int(cap))
        except ValueError:
            raise ConfigError(f"PRIOR_LIFT_THREADS={cap!r} is not an integer") from None
    return max(1, count)


def _replicate_rng(seed: int, cell_index: int, replicate: int) -> np.random.Generator:
    stream = np.random.SeedSequence(seed, spawn_key=(cell_index, replicate))
    return np.random.Generator(np.random.Philox(stream))


def run_grid(
    data: Dataset,
    class_index: int,
    config: SubsampleConfig,
    *,
    threads: int | None = None,
    point_estimators: dict | None = None,
) -> MseCurve:
    """Estimate per-cell MSE of both estimators against the full sample.

    ``point_estimators`` may override the estimator callables (each maps a
    subsample Dataset and class index to a point estimate); estimation
    errors from either one mark the replicate failed and drop it from both
    averages. Output is bit-identical for a given (data, config) whatever
    the thread count.
    """
    if not data.is_fully_labeled:
        raise InvalidDatasetError("evaluation needs a fully labeled dataset")
    h = data.n
    for r, u in config.grid:
        if r + u > h:
            raise ConfigError(f"cell ({r}, {u}): subsample size {r + u} exceeds {h} rows")

    estimators = {
        SEMI_SUPERVISED: semi_supervised_point,
        CLASSICAL: classical_point,
    }
    if point_estimators:
        estimators.update(point_estimators)
    active = config.estimators

    truth = exact_sum(data.indicator(class_index)) / h
    m = config.replicates
    full_labels = data.label_indices
    features = data.features

    def one_replicate(cell_index, offset, out):
        r, u = config.grid[cell_index]
        s = r + u
        rng = _replicate_rng(config.seed, cell_index, offset)
        rows = rng.choice(h, size=s, replace=False)
        labels = full_labels[rows].copy()
        if u:
            labels[rng.choice(s, size=u, replace=False)] = UNLABELED
        sub = Dataset.from_arrays(features[rows], labels, data.class_values)
        try:
            for slot, name in enumerate(active):
                value = estimators[name](sub, class_index)
                out[slot, offset] = (value - truth) ** 2
        except EstimationError:
            out[:, offset] = np.nan
            return False
        return True

    per_cell_sq = [np.full((len(active), m), np.nan) for _ in config.grid]
    per_cell_ok = [np.zeros(m, dtype=bool) for _ in config.grid]

    def run_chunk(cell_index, start, stop):
        sq = per_cell_sq[cell_index]
        ok = per_cell_ok[cell_index]
        for offset in range(start, stop):
            ok[offset] = one_replicate(cell_index, offset, sq)

    budget = _thread_budget(threads)
    if budget == 1:
        for cell_index in range(len(config.grid)):
            run_chunk(cell_index, 0, m)
    else:
        chunk = max(1, m // (budget * 4))
        tasks = [
            (ci, start, min(start + chunk, m))
            for ci in range(len(config.grid))
            for start in range(0, m, chunk)
        ]
        with ThreadPoolExecutor(max_workers=budget) as pool:
            futures = [pool.submit(run_chunk, *task) for task in tasks]
            for future in futures:
                future.result()

    cells = []
    for cell_index, (r, u) in enumerate(config.grid):
        ok = per_cell_ok[cell_index]
        used = int(ok.sum())
        failures = m - used
        mse = {}
        for slot, name in enumerate(active):
            # reduction in replicate-index order keeps the result
            # independent of scheduling
            values = per_cell_sq[cell_index][slot][ok]
            mse[name] = exact_sum(values) / used if used else None
        mse_semi = mse.get(SEMI_SUPERVISED)
        mse_classical = mse.get(CLASSICAL)
        ratio = None
        if mse_semi is not None and mse_classical is not None and mse_classical > 0:
            ratio = mse_semi / mse_classical
        cells.append(
            MseCell(
                r=r,
                n_minus_r=u,
                mse_semi=mse_semi,
                mse_classical=mse_classical,
                ratio=ratio,
                replicates_used=used,
                failures=failures,
                valid=used > 0,
            )
        )

    metadata = {
        "seed": config.seed,
        "replicates": m,
        "class_index": class_index,
        "population_size": h,
        "population_value": truth,
        "sampling": "without-replacement",
        "estimators": list(active),
        "smoothing_window": None,
    }
    return MseCurve(tuple(cells), metadata)


def smooth_curve(curve: MseCurve, window: int) -> MseCurve:
    """Centered moving average of the ratios along each fixed-r slice.

    Endpoints use truncated windows; a window longer than a slice degrades
    to the slice mean. Only the ratio column changes; the raw MSE fields
    stay as computed.
    """
    if window < 1 or window % 2 == 0:
        raise ConfigError(f"smoothing window must be odd and >= 1, got {window}")
    half = window // 2

    by_r: dict[int, list[int]] = {}
    for i, cell in enumerate(curve.cells):
        by_r.setdefault(cell.r, []).append(i)

    smoothed = list(curve.cells)
    for indices in by_r.values():
        indices = sorted(indices, key=lambda i: curve.cells[i].n_minus_r)
        ratios = [curve.cells[i].ratio for i in indices]
        length = len(indices)
        for pos, i in enumerate(indices):
            if window > length:
                neighborhood = ratios
            else:
                neighborhood = ratios[max(0, pos - half) : pos + half + 1]
            defined = [v for v in neighborhood if v is not None]
            value = exact_sum(defined) / len(defined) if defined else None
            smoothed[i] = replace(curve.cells[i], ratio=value)

    metadata = dict(curve.metadata)
    metadata["smoothing_window"] = window
    return MseCurve(tuple(smoothed), metadata)
