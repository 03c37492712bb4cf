"""Binary logistic regression with l1, l2, or elasticnet penalties.

Trained by accelerated proximal gradient descent (FISTA): the smooth part is
the mean logistic loss plus the ridge component, the l1 component enters
through soft-thresholding. The intercept is never penalized. Training stops
when the proximal-gradient mapping norm drops below `tol` (the subgradient
generalization of a vanishing gradient) or after `max_iter` iterations.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin

from ._validation import check_feature_matrix, check_n_features, check_X_y

PENALTIES = ("l1", "l2", "elasticnet")


def _soft_threshold(values: np.ndarray, amount: float) -> np.ndarray:
    return np.sign(values) * np.maximum(np.abs(values) - amount, 0.0)


class LogisticRegression(ClassifierMixin, BaseEstimator):
    """Regularized logistic regression.

    Parameters:
        penalty: "l1", "l2", or "elasticnet".
        strength: weight of the regularization term.
        l1_ratio: l1 share of an elasticnet penalty (ignored otherwise).
        tol: stopping threshold on the proximal-gradient mapping norm.
        max_iter: iteration cap.
        fit_intercept: learn an unpenalized bias term.
    """

    def __init__(
        self,
        penalty: str = "l2",
        strength: float = 1.0,
        l1_ratio: float = 0.5,
        tol: float = 1e-6,
        max_iter: int = 10_000,
        fit_intercept: bool = True,
    ):
        self.penalty = penalty
        self.strength = strength
        self.l1_ratio = l1_ratio
        self.tol = tol
        self.max_iter = max_iter
        self.fit_intercept = fit_intercept

    def _ratio(self) -> float:
        if self.penalty == "l1":
            return 1.0
        if self.penalty == "l2":
            return 0.0
        if self.penalty == "elasticnet":
            if not 0.0 <= self.l1_ratio <= 1.0:
                raise ValueError("l1_ratio must be in [0, 1]")
            return self.l1_ratio
        raise ValueError(f"penalty must be one of {PENALTIES}, got '{self.penalty}'")

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if self.strength < 0:
            raise ValueError("strength must be non-negative")
        ratio = self._ratio()
        lam_l1 = self.strength * ratio
        lam_l2 = self.strength * (1.0 - ratio)
        signs = (2 * y - 1).astype(float)  # internal +/-1 labels
        n, f = X.shape

        design = np.hstack([X, np.ones((n, 1))]) if self.fit_intercept else X
        # Smooth-part Lipschitz bound: spectral norm term of the logistic
        # Hessian plus the ridge curvature.
        lipschitz = np.linalg.norm(design, 2) ** 2 / (4.0 * n) + lam_l2
        step = 1.0 / lipschitz

        dim = design.shape[1]
        weights = np.zeros(dim)
        momentum_point = weights
        t_k = 1.0
        self.n_iter_ = self.max_iter
        for iteration in range(self.max_iter):
            margins = design @ momentum_point
            miss = expit(-signs * margins)
            grad = -(design.T @ (signs * miss)) / n
            if lam_l2 > 0.0:
                if self.fit_intercept:
                    grad[:-1] += lam_l2 * momentum_point[:-1]
                else:
                    grad += lam_l2 * momentum_point
            candidate = momentum_point - step * grad
            if lam_l1 > 0.0:
                if self.fit_intercept:
                    candidate[:-1] = _soft_threshold(candidate[:-1], step * lam_l1)
                else:
                    candidate = _soft_threshold(candidate, step * lam_l1)
            mapping_norm = float(np.linalg.norm(momentum_point - candidate)) / step
            t_next = (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k)) / 2.0
            momentum_point = candidate + ((t_k - 1.0) / t_next) * (candidate - weights)
            weights = candidate
            t_k = t_next
            if mapping_norm < self.tol:
                self.n_iter_ = iteration + 1
                break

        if self.fit_intercept:
            self.coef_ = weights[:-1]
            self.intercept_ = float(weights[-1])
        else:
            self.coef_ = weights
            self.intercept_ = 0.0
        self.n_features_in_ = f
        return self

    def decision_function(self, X) -> np.ndarray:
        X = check_feature_matrix(X)
        check_n_features(self, X)
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        margins = self.decision_function(X)
        # Both columns go through the same sigmoid so swapping the training
        # labels swaps the columns bit-for-bit.
        return np.column_stack([expit(-margins), expit(margins)])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int64)
