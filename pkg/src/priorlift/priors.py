"""Class prior estimates with asymptotic variance and confidence intervals.

The semi-supervised estimate averages the fitted conditional probability
over all n rows (labeled and unlabeled). Its asymptotic variance splits
into a variability-of-g term, shrinking with n, plus a sandwich term for
the coefficient noise, shrinking with the labeled count r:

    avar = (1/n) Var[g] + (1/r) B^T A^{-1} B

where B is the mean model gradient and A the average weighted information.
The classical estimate is the labeled-sample class proportion with the
binomial plug-in variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._stats import column_sums, exact_sum, normal_quantile, spd_inverse, spd_solve
from .dataset import Dataset
from .exceptions import ConfigError, ConvergenceError, SingularInformationError
from .logistic import ClassFit, FittedModel, add_intercept, logistic

__all__ = [
    "PriorEstimate",
    "InfluenceComponents",
    "estimate_prior",
    "classical_prior",
    "labeled_only_avar",
    "variance_reduction",
    "influence_components",
]


@dataclass(frozen=True)
class PriorEstimate:
    """Point estimate of one class prior with its variance decomposition.

    ``avar`` is stored as exactly ``var_g_term + sandwich_term``. For the
    classical (labeled-only proportion) estimate the binomial variance
    occupies ``var_g_term`` and ``sandwich_term`` is zero; ``method`` tells
    the two apart.
    """

    class_index: int
    q_hat: float
    var_g_term: float
    sandwich_term: float
    avar: float
    std_error: float
    ci: tuple[float, float]
    alpha: float
    method: str
    n: int
    r: int

    def __post_init__(self):
        if not 0.0 <= self.q_hat <= 1.0:
            raise ValueError(f"prior estimate {self.q_hat} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "q_hat": self.q_hat,
            "var_g_term": self.var_g_term,
            "sandwich_term": self.sandwich_term,
            "avar": self.avar,
            "std_error": self.std_error,
            "ci": [self.ci[0], self.ci[1]],
            "alpha": self.alpha,
            "method": self.method,
            "n": self.n,
            "r": self.r,
        }


@dataclass(frozen=True)
class InfluenceComponents:
    """Mean model gradient and inverse information used in the sandwich."""

    mean_gradient: np.ndarray
    info_inverse: np.ndarray


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"confidence level alpha={alpha} outside (0, 1)")


def _resolve_fit(model, class_index) -> ClassFit:
    fit = model[class_index] if isinstance(model, FittedModel) else model
    if fit.class_index != class_index:
        raise ValueError(
            f"fit is for class {fit.class_index}, requested {class_index}"
        )
    if not fit.converged:
        raise ConvergenceError(
            f"class {class_index}: model did not converge"
            + (" (separation)" if fit.separation else "")
        )
    return fit


def _interval(center, std_error, alpha):
    z = normal_quantile(1.0 - alpha / 2.0)
    return (center - z * std_error, center + z * std_error)


def variance_of_values(values, mean) -> float:
    """Mean squared deviation with divisor n (not n-1)."""
    return exact_sum((np.asarray(values) - mean) ** 2) / len(values)


def estimate_prior(
    data: Dataset, model, class_index: int, alpha: float = 0.05
) -> PriorEstimate:
    """Semi-supervised prior estimate using labeled and unlabeled rows.

    ``model`` may be a FittedModel or a single ClassFit (the latter lets
    tests inject fixed coefficients). Refuses unconverged fits; a
    non-positive-definite information matrix raises
    SingularInformationError.
    """
    _check_alpha(alpha)
    fit = _resolve_fit(model, class_index)
    n, r = data.n, data.r

    design = add_intercept(data.features)
    gv = logistic(design @ fit.theta)
    q_hat = exact_sum(gv) / n
    var_g = variance_of_values(gv, q_hat)
    var_g_term = var_g / n

    gradients = (gv * (1.0 - gv))[:, None] * design
    mean_gradient = column_sums(gradients) / n
    try:
        solved = spd_solve(fit.info, mean_gradient)
    except np.linalg.LinAlgError:
        raise SingularInformationError(
            f"class {class_index}: information matrix is not positive definite"
        ) from None
    sandwich_term = exact_sum(mean_gradient * solved) / r

    avar = var_g_term + sandwich_term
    std_error = float(np.sqrt(avar))
    return PriorEstimate(
        class_index=class_index,
        q_hat=q_hat,
        var_g_term=var_g_term,
        sandwich_term=sandwich_term,
        avar=avar,
        std_error=std_error,
        ci=_interval(q_hat, std_error, alpha),
        alpha=alpha,
        method="semi-supervised",
        n=n,
        r=r,
    )


def classical_prior(data: Dataset, class_index: int, alpha: float = 0.05) -> PriorEstimate:
    """Labeled-sample class proportion with binomial plug-in variance."""
    _check_alpha(alpha)
    y = data.indicator(class_index)
    r = data.r
    q_hat = exact_sum(y) / r
    avar = q_hat * (1.0 - q_hat) / r
    std_error = float(np.sqrt(avar))
    return PriorEstimate(
        class_index=class_index,
        q_hat=q_hat,
        var_g_term=avar,
        sandwich_term=0.0,
        avar=avar,
        std_error=std_error,
        ci=_interval(q_hat, std_error, alpha),
        alpha=alpha,
        method="classical",
        n=data.n,
        r=r,
    )


def variance_reduction(est_full: PriorEstimate, data: Dataset) -> float:
    """Variance saved by the unlabeled rows: (1/r - 1/n) * Var[g].

    Equals labeled_only_avar(est, data) - est.avar by construction.
    """
    var_g = est_full.var_g_term * data.n
    return (1.0 / data.r - 1.0 / data.n) * var_g


def labeled_only_avar(est_full: PriorEstimate, data: Dataset) -> float:
    """Asymptotic variance the same plug-in would report using r rows only."""
    return est_full.avar + variance_reduction(est_full, data)


def influence_components(data: Dataset, model, class_index: int) -> InfluenceComponents:
    """Explicit mean gradient and inverse information for one class."""
    fit = _resolve_fit(model, class_index)
    design = add_intercept(data.features)
    gv = logistic(design @ fit.theta)
    gradients = (gv * (1.0 - gv))[:, None] * design
    mean_gradient = column_sums(gradients) / data.n
    try:
        info_inverse = spd_inverse(fit.info)
    except np.linalg.LinAlgError:
        raise SingularInformationError(
            f"class {class_index}: information matrix is not positive definite"
        ) from None
    return InfluenceComponents(mean_gradient, info_inverse)
