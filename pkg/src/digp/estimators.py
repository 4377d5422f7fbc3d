"""Scikit-learn style wrappers around the greedy pursuit solvers.

Each estimator fits a sparse coefficient vector to a single measurement
vector: ``fit(X, y)`` treats the columns of ``X`` as a dictionary and
recovers ``coef_`` with at most ``n_nonzero_coefs`` nonzero entries, so
``predict(X)`` is simply ``X @ coef_``.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .pursuit import frogs, mod_omp, mod_sp
from .validation import check_support


class _GreedyRegressor(RegressorMixin, BaseEstimator):
    """Shared fit/predict plumbing; subclasses pick the solver."""

    def __init__(self, n_nonzero_coefs=None, initial_support=None):
        self.n_nonzero_coefs = n_nonzero_coefs
        self.initial_support = initial_support

    def _solver(self):
        raise NotImplementedError

    def _target_cardinality(self, n_features):
        if self.n_nonzero_coefs is None:
            return max(1, int(round(0.1 * n_features)))
        k = int(self.n_nonzero_coefs)
        if k < 1:
            raise ValueError(
                f"n_nonzero_coefs must be positive, got {self.n_nonzero_coefs}"
            )
        return k

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True,
                             dtype=np.float64, order="C")
        if y.ndim != 1:
            raise ValueError("y must be a single measurement vector")
        k = self._target_cardinality(X.shape[1])
        seed = check_support(self.initial_support, X.shape[1],
                             "initial_support")
        result = self._solver()(X, k, y, seed if seed.size else None)
        self.coef_ = result.estimate
        self.support_ = result.support
        self.residual_norm_ = result.residual_norm
        self.n_iter_ = result.n_iterations
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False, dtype=np.float64)
        return X @ self.coef_


class ModOMP(_GreedyRegressor):
    """Orthogonal matching pursuit that accepts a starting support.

    Runs exactly ``n_nonzero_coefs - |initial_support|`` greedy selection
    steps, each followed by a least-squares refit on the current support.
    """

    def _solver(self):
        return mod_omp


class ModSP(_GreedyRegressor):
    """Subspace pursuit that folds a starting support into its first
    candidate set, then iterates expand / refit / prune until the residual
    stops improving."""

    def _solver(self):
        return mod_sp


class FROGS(_GreedyRegressor):
    """Forward-reverse greedy search: orthogonal matching pursuit followed
    by backtracking passes that may swap out early mistakes."""

    def _solver(self):
        return frogs
