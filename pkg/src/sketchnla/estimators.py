"""scikit-learn style estimators over the sketching solvers.

These wrap the module-level solvers so they compose with the wider
ecosystem (get_params/set_params, clone, pipelines). Hyperparameters are
stored untouched in __init__ per sklearn convention; all validation happens
in fit.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin

from ._validation import as_dense, as_matrix, resolve_seed
from .leverage import approx_leverage_scores, sampling_probs_from_scores
from .lowrank import low_rank_approx
from .lp import LpParams, lp_regress
from .regress import (
    cgnr_solve,
    generalized_regression,
    nonneg_regression,
    precondition,
    richardson_solve,
    sketch_solve_ls,
)

_METHODS = ("sketch", "coreset", "richardson", "cgnr", "nnls")


class SketchedLinearRegression(BaseEstimator, RegressorMixin):
    """Least squares through a sketch: direct, coreset, iterative, or NNLS.

    Parameters
    ----------
    method : one of "sketch", "coreset", "richardson", "cgnr", "nnls"
    eps : target relative error of the sketch
    seed : RNG seed; None falls back to SKETCHNLA_SEED, then 0
    max_iter : iteration cap for the iterative methods
    """

    def __init__(self, method="sketch", eps=0.5, seed=None, max_iter=100):
        self.method = method
        self.eps = eps
        self.seed = seed
        self.max_iter = max_iter

    def fit(self, X, y):
        X = as_matrix(X)
        y = as_dense(np.asarray(y), "y")
        seed = resolve_seed(self.seed)
        if self.method == "sketch":
            sol = sketch_solve_ls(X, y, self.eps, seed)
        elif self.method == "coreset":
            sol, coreset = generalized_regression(X, y, self.eps, seed)
            self.coreset_ = coreset
        elif self.method in ("richardson", "cgnr"):
            pre = precondition(X, min(self.eps, 0.5), seed)
            solve = richardson_solve if self.method == "richardson" else cgnr_solve
            sol = solve(X, pre, y, self.eps, self.max_iter)
        elif self.method == "nnls":
            sol = nonneg_regression(X, y, self.eps, seed)
        else:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        self.coef_ = sol.x
        self.solution_ = sol
        self.residual_norm_ = sol.residual_norm
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = as_matrix(X)
        out = np.asarray(X @ self.coef_)
        return out.ravel() if out.shape[1] == 1 else out


class LpRegression(BaseEstimator, RegressorMixin):
    """Sampled lp regression, p in [1, inf)."""

    def __init__(self, p=1.0, eps=0.5, seed=None, t_coreset=None):
        self.p = p
        self.eps = eps
        self.seed = seed
        self.t_coreset = t_coreset

    def fit(self, X, y):
        X = as_matrix(X)
        y = as_dense(np.asarray(y), "y")
        params = LpParams(p=float(self.p), eps=float(self.eps), seed=resolve_seed(self.seed))
        sol = lp_regress(X, y, params, t_coreset=self.t_coreset)
        self.coef_ = sol.x
        self.solution_ = sol
        self.residual_norm_ = sol.residual_norm
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = as_matrix(X)
        return np.asarray(X @ self.coef_).ravel()


class RandomizedLowRank(BaseEstimator, TransformerMixin):
    """Rank-k decomposition estimator; transform projects onto the right factors."""

    def __init__(self, k=2, eps=0.5, seed=None, strategy="srht_compose"):
        self.k = k
        self.eps = eps
        self.seed = seed
        self.strategy = strategy

    def fit(self, X, y=None):
        X = as_matrix(X)
        res = low_rank_approx(
            X, self.k, self.eps, resolve_seed(self.seed), strategy=self.strategy
        )
        self.result_ = res
        self.left_factors_ = res.factors.l
        self.singular_values_ = res.factors.d
        self.components_ = res.factors.w.T  # k x n_features, sklearn orientation
        self.err_ = res.err
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = as_matrix(X)
        return np.asarray(X @ self.components_.T)

    def inverse_transform(self, Xt):
        return np.asarray(Xt) @ self.components_


class LeverageScoreEstimator(BaseEstimator):
    """Approximate leverage scores of the fitted matrix's rows."""

    def __init__(self, eps=0.5, repetitions=5, seed=None):
        self.eps = eps
        self.repetitions = repetitions
        self.seed = seed

    def fit(self, X, y=None):
        X = as_matrix(X)
        res = approx_leverage_scores(
            X, self.eps, self.repetitions, resolve_seed(self.seed)
        )
        self.scores_ = res.scores
        self.rank_ = res.rank
        self.result_ = res
        self.n_features_in_ = X.shape[1]
        return self

    def sampling_probabilities(self):
        return sampling_probs_from_scores(self.result_, max(self.rank_, 1))
