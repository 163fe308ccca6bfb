"""Should-you-collect-unlabeled-data measures.

Two per-class summaries of a fitted model:

* eta: proportional reduction in misclassification probability from using
  the features, a classification-strength analog of R-squared in [0, 1].
* sigma: variance of the fitted conditional probability across the sample.

Only sigma predicts how much the unlabeled rows help (it is exactly the
quantity scaled by the variance-reduction identity), so the recommendation
thresholds apply to sigma; eta is reported for context.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._stats import exact_sum
from .dataset import Dataset
from .exceptions import DegeneratePriorError
from .logistic import add_intercept, logistic
from .priors import _resolve_fit, variance_of_values

__all__ = ["Recommendation", "DiagnosticsReport", "eta", "sigma", "recommend", "diagnose"]

USEFUL_THRESHOLD = 0.03
MARGINAL_THRESHOLD = 0.01


class Recommendation(str, enum.Enum):
    USEFUL = "useful"
    MARGINAL = "marginal"
    NOT_USEFUL = "not-useful"


@dataclass(frozen=True)
class DiagnosticsReport:
    class_index: int
    eta: float
    sigma: float
    recommendation: Recommendation
    useful_threshold: float
    marginal_threshold: float
    eta_clamped: bool

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "eta": self.eta,
            "sigma": self.sigma,
            "recommendation": self.recommendation.value,
            "thresholds": {
                "useful": self.useful_threshold,
                "marginal": self.marginal_threshold,
            },
            "eta_clamped": self.eta_clamped,
        }


def _fitted_probabilities(data, model, class_index):
    fit = _resolve_fit(model, class_index)
    return logistic(add_intercept(data.features) @ fit.theta)


def _eta_value(gv, n):
    q_hat = exact_sum(gv) / n
    if q_hat in (0.0, 1.0):
        raise DegeneratePriorError(
            "estimated prior is 0 or 1; misclassification ratio undefined"
        )
    baseline = min(q_hat, 1.0 - q_hat)
    conditional = exact_sum(np.minimum(gv, 1.0 - gv)) / n
    raw = (baseline - conditional) / baseline
    clamped = min(1.0, max(0.0, raw))
    return clamped, clamped != raw


def eta(data: Dataset, model, class_index: int) -> float:
    """Proportional reduction in misclassification probability, in [0, 1].

    Plug-in over all n rows: baseline error min(q, 1-q) versus the mean of
    min(g_i, 1-g_i). Values outside [0, 1] from floating noise are clamped
    (see :func:`diagnose` for the clamp flag).
    """
    gv = _fitted_probabilities(data, model, class_index)
    value, _ = _eta_value(gv, data.n)
    return value


def sigma(data: Dataset, model, class_index: int) -> float:
    """Sample variance (divisor n) of the fitted conditional probability."""
    gv = _fitted_probabilities(data, model, class_index)
    q_hat = exact_sum(gv) / data.n
    return variance_of_values(gv, q_hat)


def recommend(
    eta_value: float,
    sigma_value: float,
    useful_threshold: float = USEFUL_THRESHOLD,
    marginal_threshold: float = MARGINAL_THRESHOLD,
) -> Recommendation:
    """Advise on collecting unlabeled data; decides on sigma alone."""
    if sigma_value >= useful_threshold:
        return Recommendation.USEFUL
    if sigma_value >= marginal_threshold:
        return Recommendation.MARGINAL
    return Recommendation.NOT_USEFUL


def diagnose(
    data: Dataset,
    model,
    class_index: int,
    useful_threshold: float = USEFUL_THRESHOLD,
    marginal_threshold: float = MARGINAL_THRESHOLD,
) -> DiagnosticsReport:
    """Full per-class report: eta, sigma, and the thresholded recommendation."""
    gv = _fitted_probabilities(data, model, class_index)
    eta_value, clamped = _eta_value(gv, data.n)
    q_hat = exact_sum(gv) / data.n
    sigma_value = variance_of_values(gv, q_hat)
    return DiagnosticsReport(
        class_index=class_index,
        eta=eta_value,
        sigma=sigma_value,
        recommendation=recommend(
            eta_value, sigma_value, useful_threshold, marginal_threshold
        ),
        useful_threshold=useful_threshold,
        marginal_threshold=marginal_threshold,
        eta_clamped=clamped,
    )
