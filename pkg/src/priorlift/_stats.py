"""Shared numeric helpers: exactly-rounded sums, SPD solves, normal quantile."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "exact_sum",
    "column_sums",
    "weighted_gram",
    "spd_solve",
    "spd_inverse",
    "normal_quantile",
]


def exact_sum(values) -> float:
    """Sum of a 1-D array with a single correctly-rounded result.

    math.fsum is exactly rounded, which makes every accumulation in this
    package invariant under permutation of its input rows.
    """
    arr = np.asarray(values, dtype=np.float64)
    return math.fsum(arr.tolist())


def column_sums(matrix) -> np.ndarray:
    """Exactly-rounded sum of each column of a 2-D array."""
    m = np.asarray(matrix, dtype=np.float64)
    cols = m.T.tolist()
    return np.array([math.fsum(c) for c in cols], dtype=np.float64)


def weighted_gram(matrix, row_weights) -> np.ndarray:
    """Sum_i w_i * m_i m_i^T with exactly-rounded entries (symmetric)."""
    m = np.asarray(matrix, dtype=np.float64)
    w = np.asarray(row_weights, dtype=np.float64)
    p = m.shape[1]
    out = np.empty((p, p), dtype=np.float64)
    for a in range(p):
        wa = w * m[:, a]
        for b in range(a, p):
            s = math.fsum((wa * m[:, b]).tolist())
            out[a, b] = s
            out[b, a] = s
    return out


def spd_solve(a, b) -> np.ndarray:
    """Solve a x = b for symmetric positive definite a.

    Raises numpy.linalg.LinAlgError when the Cholesky factorization fails;
    callers translate that into their domain-specific error.
    """
    lower = np.linalg.cholesky(a)
    y = np.linalg.solve(lower, b)
    return np.linalg.solve(lower.T, y)


def spd_inverse(a) -> np.ndarray:
    p = np.asarray(a).shape[0]
    return spd_solve(a, np.eye(p))


# Rational approximation of the standard normal quantile function
# (Wichura's PPND16); absolute error below 1e-15 on (0, 1), well inside
# the 1e-9 contract.

_CENTRAL_NUM = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_CENTRAL_DEN = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_TAIL_NUM = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_TAIL_DEN = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_FAR_TAIL_NUM = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_FAR_TAIL_DEN = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal distribution function on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_CENTRAL_NUM, r) / _poly(_CENTRAL_DEN, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        value = _poly(_TAIL_NUM, r) / _poly(_TAIL_DEN, r)
    else:
        r -= 5.0
        value = _poly(_FAR_TAIL_NUM, r) / _poly(_FAR_TAIL_DEN, r)
    return -value if q < 0.0 else value
