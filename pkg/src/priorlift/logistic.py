"""Logistic conditional-probability family and its weighted least-squares fit.

The family is P(class | features = t) = 1 / (1 + exp(-theta^T t)) with an
intercept prepended to t. Fitting solves the weighted score equation

    0 = sum_i weight(t_i) * (y_i - g(t_i)) * g'(t_i)

over the labeled rows by Newton iteration (iteratively reweighted least
squares). For this family the score simplifies analytically to
sum_i (y_i - g(t_i)) t_i, which is what the solver accumulates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._stats import column_sums, exact_sum, weighted_gram
from .dataset import Dataset
from .exceptions import (
    ConvergenceError,
    DegenerateClassError,
    ShapeError,
    SingularDesignError,
)

__all__ = [
    "PROB_CLAMP",
    "logistic",
    "add_intercept",
    "g",
    "g_prime",
    "weight",
    "ClassFit",
    "FittedModel",
    "fit_class",
    "fit_model",
]

# Probabilities are clamped to [PROB_CLAMP, 1 - PROB_CLAMP] inside the
# weight function and the deviance; both are singular at 0 and 1.
PROB_CLAMP = 1e-10

SCORE_TOL = 1e-8
DEVIANCE_TOL = 1e-10
MAX_ITERATIONS = 50
MAX_STEP_HALVINGS = 20
SEPARATION_NORM = 1e4


def logistic(z):
    """Stable sigmoid 1/(1+exp(-z)), split on the sign of z."""
    arr = np.atleast_1d(np.asarray(z, dtype=np.float64))
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ez = np.exp(arr[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if np.ndim(z) else float(out[0])


def add_intercept(features) -> np.ndarray:
    """Prepend a constant-1 column; coefficient 0 is the intercept."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return np.hstack([np.ones((x.shape[0], 1)), x])


def _check_dims(t, theta):
    t = np.asarray(t, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if t.shape[-1] != theta.shape[0]:
        raise ShapeError(
            f"feature vector of length {t.shape[-1]} does not match "
            f"{theta.shape[0]} coefficients"
        )
    return t, theta


def g(t, theta):
    """Conditional class probability at feature vector(s) t (with intercept)."""
    t, theta = _check_dims(t, theta)
    return logistic(t @ theta)


def g_prime(t, theta):
    """Gradient of g in theta: g(1-g) * t."""
    t, theta = _check_dims(t, theta)
    gv = logistic(t @ theta)
    if t.ndim > 1:
        return (gv * (1.0 - gv))[:, None] * t
    return gv * (1.0 - gv) * t


def weight(t, theta):
    """Inverse conditional variance 1/[g(1-g)], with g clamped away from 0/1."""
    gv = np.clip(g(t, theta), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return 1.0 / (gv * (1.0 - gv))


def _deviance(y, gv) -> float:
    gc = np.clip(gv, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return -2.0 * exact_sum(y * np.log(gc) + (1.0 - y) * np.log1p(-gc))


@dataclass(frozen=True)
class ClassFit:
    """One-vs-rest fit for a single class.

    ``info`` is the average of weight * g' g'^T over the labeled rows,
    evaluated at the returned coefficients.
    """

    class_index: int
    theta: np.ndarray
    info: np.ndarray
    iterations: int
    converged: bool
    score_norm: float
    separation: bool = False

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "theta": list(self.theta),
            "info_matrix": [list(row) for row in self.info],
            "converged": self.converged,
            "iterations": self.iterations,
            "score_norm": self.score_norm,
            "separation": self.separation,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ClassFit":
        return cls(
            class_index=int(payload["class_index"]),
            theta=np.array(payload["theta"], dtype=np.float64),
            info=np.array(payload["info_matrix"], dtype=np.float64),
            iterations=int(payload["iterations"]),
            converged=bool(payload["converged"]),
            score_norm=float(payload["score_norm"]),
            separation=bool(payload.get("separation", False)),
        )


@dataclass(frozen=True)
class FittedModel:
    """Per-class fits, indexable by class."""

    fits: tuple[ClassFit, ...]

    def __getitem__(self, class_index: int) -> ClassFit:
        for fit in self.fits:
            if fit.class_index == class_index:
                return fit
        raise IndexError(f"no fit for class {class_index}")

    def __iter__(self):
        return iter(self.fits)

    def __len__(self):
        return len(self.fits)

    def to_json(self) -> str:
        return json.dumps([f.to_dict() for f in self.fits], indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FittedModel":
        return cls(tuple(ClassFit.from_dict(p) for p in json.loads(text)))


def _average_information(design, theta, r) -> np.ndarray:
    gv = logistic(design @ theta)
    gc = np.clip(gv, PROB_CLAMP, 1.0 - PROB_CLAMP)
    w = 1.0 / (gc * (1.0 - gc))
    grad = (gv * (1.0 - gv))[:, None] * design
    return weighted_gram(grad, w) / r


def fit_class(
    data: Dataset,
    class_index: int,
    *,
    tol: float = SCORE_TOL,
    deviance_tol: float = DEVIANCE_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> ClassFit:
    """Fit the class-vs-rest coefficients on the labeled rows.

    Newton steps from a zero start, halving the step while the deviance
    increases. Stops when the score sup-norm falls below ``tol`` or the
    relative deviance change falls below ``deviance_tol``; only the score
    criterion sets the converged flag. A coefficient norm beyond 1e4 while
    the score is still shrinking is reported as separation (flag, not an
    error); anything else that fails to converge raises ConvergenceError
    with the iteration trace.
    """
    y = data.indicator(class_index)
    r = data.r
    if y.sum() == 0 or y.sum() == r:
        raise DegenerateClassError(
            f"class {class_index} is constant over the {r} labeled rows"
        )
    design = add_intercept(data.labeled_features())
    p = design.shape[1]

    theta = np.zeros(p)
    gv = logistic(design @ theta)
    deviance = _deviance(y, gv)
    trace = []
    converged = False
    separation = False
    iterations = 0
    # The deviance settles one Newton step before the score does, so a
    # single stalled iteration gets a grace step to let the score
    # criterion certify; two in a row means genuinely stuck.
    stalls = 0

    while iterations < max_iterations:
        iterations += 1
        score = column_sums(design * (y - gv)[:, None])
        score_norm = float(np.max(np.abs(score)))
        trace.append((iterations, score_norm, deviance))
        if score_norm <= tol:
            converged = True
            break
        if float(np.linalg.norm(theta)) > SEPARATION_NORM:
            separation = True
            break
        if stalls >= 2:
            break

        hessian = weighted_gram(design, gv * (1.0 - gv))
        try:
            lower = np.linalg.cholesky(hessian)
        except np.linalg.LinAlgError:
            raise SingularDesignError(
                f"weighted design is rank deficient at iteration {iterations}"
            ) from None
        direction = np.linalg.solve(lower.T, np.linalg.solve(lower, score))

        # accept steps whose deviance increase is inside rounding noise,
        # or the final polish steps never pass
        slack = deviance_tol * (abs(deviance) + 1.0)
        scale = 1.0
        for _ in range(MAX_STEP_HALVINGS + 1):
            candidate = theta + scale * direction
            cand_g = logistic(design @ candidate)
            cand_dev = _deviance(y, cand_g)
            if cand_dev <= deviance + slack:
                break
            scale *= 0.5

        if abs(deviance - cand_dev) <= deviance_tol * (abs(deviance) + 1.0):
            stalls += 1
        else:
            stalls = 0
        theta, gv = candidate, cand_g
        deviance = cand_dev

    if not converged:
        final_score = column_sums(design * (y - gv)[:, None])
        score_norm = float(np.max(np.abs(final_score)))
        if score_norm <= tol:
            converged = True
        elif not separation:
            raise ConvergenceError(
                f"class {class_index}: score norm {score_norm:.3e} after "
                f"{iterations} iterations",
                trace=trace,
            )

    return ClassFit(
        class_index=class_index,
        theta=theta,
        info=_average_information(design, theta, r),
        iterations=iterations,
        converged=converged,
        score_norm=score_norm,
        separation=separation,
    )


def fit_model(data: Dataset, **kwargs) -> FittedModel:
    """Fit every class one-vs-rest; classes share only the read-only data."""
    return FittedModel(
        tuple(fit_class(data, j, **kwargs) for j in range(data.class_count))
    )
