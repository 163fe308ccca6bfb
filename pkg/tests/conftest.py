"""Shared fixtures and synthetic data helpers."""

import os
from pathlib import Path

import numpy as np
import pytest

import priorlift as pl

REPO_ROOT = Path(__file__).resolve().parent.parent

# Real benchmark CSVs are not redistributable with the package; tests that
# need them look here and skip with instructions when absent.
DATA_DIR = Path(os.environ.get("PRIOR_LIFT_DATA_DIR", REPO_ROOT / "data"))


def real_dataset(name: str) -> Path:
    path = DATA_DIR / f"{name}.csv"
    if not path.exists():
        pytest.skip(
            f"{name}.csv not found under {DATA_DIR} "
            "(see docs/datasets.md for download instructions)"
        )
    return path


def synthetic_binary(theta, n, r, seed, feature_rng=None):
    """Logistic population: X ~ N(0, I), P(class 1 | x) = sigmoid(theta . (1, x)).

    Rows 0..r-1 stay labeled, the rest are stripped.
    """
    rng = np.random.default_rng(seed) if feature_rng is None else feature_rng
    theta = np.asarray(theta, dtype=float)
    X = rng.normal(size=(n, theta.shape[0] - 1))
    z = theta[0] + X @ theta[1:]
    y = (rng.random(n) < pl.logistic(z)).astype(np.int64)
    labels = y.copy()
    labels[r:] = -1
    return pl.Dataset.from_arrays(X, labels, ("0", "1"))


def independent_binary(n, r, seed, prior=0.4, features=2):
    """Features carry no information about the class."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, features))
    y = (rng.random(n) < prior).astype(np.int64)
    labels = y.copy()
    labels[r:] = -1
    return pl.Dataset.from_arrays(X, labels, ("0", "1"))


def injected_fit(theta, data, class_index=1):
    """ClassFit with fixed coefficients and a real information matrix.

    Lets tests pin the fitted probabilities exactly without running the
    solver.
    """
    design = pl.add_intercept(data.labeled_features())
    gv = pl.logistic(design @ np.asarray(theta, dtype=float))
    w = 1.0 / np.clip(gv * (1.0 - gv), 1e-10, None)
    grad = (gv * (1.0 - gv))[:, None] * design
    info = (grad * w[:, None]).T @ grad / data.r
    # guard against exactly singular injected information
    info = info + 1e-12 * np.eye(info.shape[0])
    return pl.ClassFit(
        class_index=class_index,
        theta=np.asarray(theta, dtype=float),
        info=info,
        iterations=0,
        converged=True,
        score_norm=0.0,
    )
