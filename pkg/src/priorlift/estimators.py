"""Scikit-learn compatible front end.

``PriorEstimator`` follows the semi-supervised sklearn convention: pass
the full feature matrix and a label vector where unlabeled rows carry the
marker value (-1 by default). After ``fit`` the class priors, standard
errors, and confidence intervals are available as fitted attributes, and
the per-class logistic models back ``predict``/``predict_proba`` so the
estimator drops into pipelines and model-selection tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array, column_or_1d

from .dataset import Dataset
from .logistic import add_intercept, fit_model, logistic
from .priors import classical_prior, estimate_prior, variance_reduction

__all__ = ["PriorEstimator"]


class PriorEstimator(BaseEstimator, ClassifierMixin):
    """Estimate class priors from labeled plus unlabeled rows.

    Parameters
    ----------
    alpha : float, default=0.05
        Confidence level parameter; intervals cover 100*(1-alpha) percent.
    unlabeled_marker : int or str, default=-1
        Label value marking unlabeled rows in ``y``.

    Attributes
    ----------
    classes_ : ndarray
        Distinct labels, sorted, marker excluded.
    priors_ : ndarray of shape (n_classes,)
        Semi-supervised prior estimate per class.
    std_errors_ : ndarray of shape (n_classes,)
        Asymptotic standard error per prior.
    intervals_ : ndarray of shape (n_classes, 2)
        Confidence interval per prior.
    estimates_ : tuple of PriorEstimate
        Full variance decompositions.
    classical_estimates_ : tuple of PriorEstimate
        Labeled-only proportions for comparison.
    variance_reductions_ : ndarray of shape (n_classes,)
        Asymptotic variance saved by the unlabeled rows, per class.
    """

    def __init__(self, alpha=0.05, unlabeled_marker=-1):
        self.alpha = alpha
        self.unlabeled_marker = unlabeled_marker

    def fit(self, X, y):
        """Fit per-class logistic models and estimate every class prior.

        Parameters
        ----------
        X : array-like of shape (n_samples, n_features)
        y : array-like of shape (n_samples,)
            Class labels with ``unlabeled_marker`` for unlabeled rows.
        """
        X = check_array(X, dtype=np.float64)
        y = column_or_1d(y)
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y have inconsistent lengths")

        labeled = y != self.unlabeled_marker
        classes = np.unique(y[labeled])
        lookup = {value: index for index, value in enumerate(classes)}
        indices = np.fromiter(
            (lookup[v] if keep else -1 for v, keep in zip(y, labeled)),
            dtype=np.int64,
            count=len(y),
        )
        dataset = Dataset.from_arrays(
            X, indices, tuple(str(v) for v in classes)
        )

        model = fit_model(dataset)
        estimates = tuple(
            estimate_prior(dataset, model, j, self.alpha)
            for j in range(dataset.class_count)
        )
        classical = tuple(
            classical_prior(dataset, j, self.alpha)
            for j in range(dataset.class_count)
        )

        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        self.model_ = model
        self.estimates_ = estimates
        self.classical_estimates_ = classical
        self.priors_ = np.array([e.q_hat for e in estimates])
        self.std_errors_ = np.array([e.std_error for e in estimates])
        self.intervals_ = np.array([e.ci for e in estimates])
        self.variance_reductions_ = np.array(
            [variance_reduction(e, dataset) for e in estimates]
        )
        return self

    def _check_input(self, X):
        if not hasattr(self, "model_"):
            raise NotFittedError("fit must be called before prediction")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, estimator saw {self.n_features_in_}"
            )
        return X

    def predict_proba(self, X):
        """Per-class conditional probabilities, normalized across classes.

        The one-vs-rest fits need not sum to one row-wise, so rows are
        rescaled to a proper distribution.
        """
        X = self._check_input(X)
        design = add_intercept(X)
        raw = np.column_stack(
            [logistic(design @ self.model_[j].theta) for j in range(len(self.classes_))]
        )
        if raw.shape[1] == 1:
            return np.ones_like(raw)
        return raw / raw.sum(axis=1, keepdims=True)

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]
