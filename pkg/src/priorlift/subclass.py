"""Conditional class probabilities over feature regions.

A region is a conjunction of per-feature interval constraints (or, for
testing, an arbitrary membership function). The semi-supervised estimate
ratios the fitted probabilities of the in-region rows over all n
observations; the classical one uses only labeled in-region rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._stats import column_sums, exact_sum, normal_quantile, spd_solve
from .dataset import Dataset
from .exceptions import ConfigError, EmptyRegionError, SingularInformationError
from .logistic import add_intercept, logistic
from .priors import _check_alpha, _resolve_fit, variance_of_values

__all__ = ["Constraint", "Region", "SubclassEstimate", "estimate_subclass", "classical_subclass"]


@dataclass(frozen=True)
class Constraint:
    """Interval constraint on one feature; default closed-below, open-above."""

    feature_index: int
    lower: float = -math.inf
    upper: float = math.inf
    closed_lower: bool = True
    closed_upper: bool = False

    def __post_init__(self):
        if self.feature_index < 0:
            raise ConfigError("feature index must be non-negative")
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ConfigError("region bounds cannot be NaN")
        if self.lower > self.upper:
            raise ConfigError(
                f"region lower bound {self.lower} exceeds upper {self.upper}"
            )

    def mask(self, features: np.ndarray) -> np.ndarray:
        col = features[:, self.feature_index]
        low = col >= self.lower if self.closed_lower else col > self.lower
        high = col <= self.upper if self.closed_upper else col < self.upper
        return low & high


class Region:
    """Feature-space region: conjunction of constraints or a callable."""

    def __init__(self, constraints=(), membership=None):
        self.constraints = tuple(constraints)
        self.membership = membership
        if membership is None and not self.constraints:
            raise ConfigError("region needs at least one constraint")

    @classmethod
    def from_callable(cls, membership) -> "Region":
        """Region defined by a function mapping an (n, f) matrix to a bool mask."""
        return cls(membership=membership)

    def mask(self, features: np.ndarray) -> np.ndarray:
        if self.membership is not None:
            out = np.asarray(self.membership(features), dtype=bool)
            if out.shape != (features.shape[0],):
                raise ConfigError("membership function must return one bool per row")
            return out
        out = np.ones(features.shape[0], dtype=bool)
        for c in self.constraints:
            if c.feature_index >= features.shape[1]:
                raise ConfigError(
                    f"constraint on feature {c.feature_index} but data has "
                    f"{features.shape[1]} features"
                )
            out &= c.mask(features)
        return out


@dataclass(frozen=True)
class SubclassEstimate:
    """Estimated P(class | features in region) with variance pieces."""

    class_index: int
    q_hat_w: float
    p_hat_w: float
    v_hat: float
    avar: float
    std_error: float
    ci: tuple[float, float]
    alpha: float
    method: str
    observations_in_region: int

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "q_hat_w": self.q_hat_w,
            "p_hat_w": self.p_hat_w,
            "v_hat": self.v_hat,
            "avar": self.avar,
            "std_error": self.std_error,
            "ci": [self.ci[0], self.ci[1]],
            "alpha": self.alpha,
            "method": self.method,
            "observations_in_region": self.observations_in_region,
        }


def _interval(center, std_error, alpha):
    z = normal_quantile(1.0 - alpha / 2.0)
    return (center - z * std_error, center + z * std_error)


def estimate_subclass(
    data: Dataset,
    model,
    class_index: int,
    region: Region,
    alpha: float = 0.05,
) -> SubclassEstimate:
    """Semi-supervised conditional probability over a feature region.

    With the whole feature space as region this reproduces the prior
    estimate exactly, value and variance alike.
    """
    _check_alpha(alpha)
    fit = _resolve_fit(model, class_index)
    n, r = data.n, data.r

    member = region.mask(data.features)
    in_region = int(member.sum())
    if in_region == 0:
        raise EmptyRegionError("no observations fall in the region")
    indicator = member.astype(np.float64)

    design = add_intercept(data.features)
    gv = logistic(design @ fit.theta)
    masked = gv * indicator

    p_hat = exact_sum(indicator) / n
    v_hat = exact_sum(masked) / n
    q_hat = v_hat / p_hat
    var_masked = variance_of_values(masked, v_hat) / n

    gradients = (gv * (1.0 - gv) * indicator)[:, None] * design
    mean_gradient = column_sums(gradients) / n
    try:
        solved = spd_solve(fit.info, mean_gradient)
    except np.linalg.LinAlgError:
        raise SingularInformationError(
            f"class {class_index}: information matrix is not positive definite"
        ) from None
    sandwich = exact_sum(mean_gradient * solved) / r

    avar = (var_masked + sandwich) / (p_hat * p_hat)
    std_error = float(np.sqrt(avar))
    return SubclassEstimate(
        class_index=class_index,
        q_hat_w=q_hat,
        p_hat_w=p_hat,
        v_hat=v_hat,
        avar=avar,
        std_error=std_error,
        ci=_interval(q_hat, std_error, alpha),
        alpha=alpha,
        method="semi-supervised",
        observations_in_region=in_region,
    )


def classical_subclass(
    data: Dataset, class_index: int, region: Region, alpha: float = 0.05
) -> SubclassEstimate:
    """Labeled-only in-region class proportion with binomial variance."""
    _check_alpha(alpha)
    r = data.r
    member = region.mask(data.labeled_features())
    r_w = int(member.sum())
    if r_w == 0:
        raise EmptyRegionError("no labeled observations fall in the region")
    y = data.indicator(class_index)

    q_hat = exact_sum(y * member) / r_w
    p_hat = r_w / r
    avar = q_hat * (1.0 - q_hat) / r_w
    std_error = float(np.sqrt(avar))
    return SubclassEstimate(
        class_index=class_index,
        q_hat_w=q_hat,
        p_hat_w=p_hat,
        v_hat=q_hat * p_hat,
        avar=avar,
        std_error=std_error,
        ci=_interval(q_hat, std_error, alpha),
        alpha=alpha,
        method="classical",
        observations_in_region=r_w,
    )
