"""Kernel support vector classifier trained by sequential minimal optimization.

The dual problem is optimized two multipliers at a time: the outer loop scans
every sample, and whenever one violates the KKT conditions by more than
`kkt_tol` a random partner is drawn and the pair is solved analytically.
Optimization ends on the first full pass with no violations (or when progress
stalls repeatedly). Probabilities come from a sigmoid fitted to the training
decision values.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin

from ._validation import check_feature_matrix, check_n_features, check_X_y

KERNELS = ("rbf", "linear", "poly", "sigmoid")

#: Alphas below this are dropped from the support set after training.
_SUPPORT_CUTOFF = 1e-8
#: Minimum multiplier move counted as progress.
_MIN_ALPHA_STEP = 1e-5
#: Consecutive stalled passes tolerated before giving up on remaining violations.
_STALL_LIMIT = 5


def kernel_matrix(
    left: np.ndarray,
    right: np.ndarray,
    kernel: str,
    gamma: float,
    degree: int,
    coef0: float,
) -> np.ndarray:
    if kernel == "linear":
        return left @ right.T
    if kernel == "rbf":
        sq = (
            np.sum(left * left, axis=1)[:, None]
            + np.sum(right * right, axis=1)[None, :]
            - 2.0 * (left @ right.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    if kernel == "poly":
        return (gamma * (left @ right.T) + coef0) ** degree
    if kernel == "sigmoid":
        return np.tanh(gamma * (left @ right.T) + coef0)
    raise ValueError(f"kernel must be one of {KERNELS}, got '{kernel}'")


def _fit_platt_scaling(decision: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Newton fit of P(class 1 | f) = 1 / (1 + exp(a*f + b)).

    Uses the standard prior-corrected targets so the sigmoid is not forced
    through 0 and 1 on separable data. With z = a*f + b the cross-entropy is
    sum(log(1 + exp(z)) - (1 - t)*z), whose z-gradient is t - P(class 1).
    """
    n_pos = int(np.sum(y == 1))
    n_neg = len(y) - n_pos
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    target = np.where(y == 1, hi, lo)

    a, b = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    floor = 1e-12  # keeps the Hessian invertible

    def objective(a_: float, b_: float) -> float:
        z = a_ * decision + b_
        linear = np.where(z >= 0, target * z, (target - 1.0) * z)
        return float(np.sum(linear + np.log1p(np.exp(-np.abs(z)))))

    value = objective(a, b)
    for _ in range(100):
        z = a * decision + b
        p_one = expit(-z)
        residual = target - p_one
        grad_a = float(np.sum(decision * residual))
        grad_b = float(np.sum(residual))
        if abs(grad_a) < 1e-10 and abs(grad_b) < 1e-10:
            break
        curvature = p_one * (1.0 - p_one)
        h11 = float(np.sum(decision * decision * curvature)) + floor
        h22 = float(np.sum(curvature)) + floor
        h12 = float(np.sum(decision * curvature))
        det = h11 * h22 - h12 * h12
        step_a = -(h22 * grad_a - h12 * grad_b) / det
        step_b = -(h11 * grad_b - h12 * grad_a) / det
        descent = grad_a * step_a + grad_b * step_b
        scale = 1.0
        while scale > 1e-10:
            new_value = objective(a + scale * step_a, b + scale * step_b)
            if new_value < value + 1e-4 * scale * descent:
                break
            scale /= 2.0
        a += scale * step_a
        b += scale * step_b
        value = objective(a, b)
    return a, b


class SVC(ClassifierMixin, BaseEstimator):
    """Binary kernel SVM with sigmoid-calibrated probabilities.

    Parameters:
        C: box constraint on the dual multipliers.
        kernel: "rbf", "linear", "poly", or "sigmoid".
        gamma: kernel width; None means 1 / n_features.
        degree: polynomial degree (poly kernel only).
        coef0: additive kernel constant (poly and sigmoid).
        kkt_tol: largest tolerated KKT violation.
        max_passes: cap on full sweeps over the training set.
        random_state: seed for the random partner choice in each pair update.
    """

    def __init__(
        self,
        C: float = 1.0,
        kernel: str = "rbf",
        gamma: float | None = None,
        degree: int = 3,
        coef0: float = 0.0,
        kkt_tol: float = 1e-3,
        max_passes: int = 200,
        random_state: int = 0,
    ):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.kkt_tol = kkt_tol
        self.max_passes = max_passes
        self.random_state = random_state

    def _gamma_value(self, n_features: int) -> float:
        return self.gamma if self.gamma is not None else 1.0 / n_features

    def fit(self, X, y):
        X, y01 = check_X_y(X, y)
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got '{self.kernel}'")
        n, f = X.shape
        signs = (2 * y01 - 1).astype(float)
        gamma = self._gamma_value(f)
        gram = kernel_matrix(X, X, self.kernel, gamma, self.degree, self.coef0)

        rng = np.random.default_rng(self.random_state)
        alphas = np.zeros(n)
        bias = 0.0
        margins = np.zeros(n)  # running decision values on the training set
        stalled = 0
        for _ in range(self.max_passes):
            changed = 0
            violations = 0
            for i in range(n):
                error_i = margins[i] - signs[i]
                r = signs[i] * error_i
                if not (
                    (r < -self.kkt_tol and alphas[i] < self.C)
                    or (r > self.kkt_tol and alphas[i] > 0)
                ):
                    continue
                violations += 1
                j = int(rng.integers(n - 1))
                if j >= i:
                    j += 1
                error_j = margins[j] - signs[j]
                alpha_i, alpha_j = alphas[i], alphas[j]
                if signs[i] == signs[j]:
                    low = max(0.0, alpha_i + alpha_j - self.C)
                    high = min(self.C, alpha_i + alpha_j)
                else:
                    low = max(0.0, alpha_j - alpha_i)
                    high = min(self.C, self.C + alpha_j - alpha_i)
                if high - low < 1e-12:
                    continue
                eta = 2.0 * gram[i, j] - gram[i, i] - gram[j, j]
                if eta >= 0:
                    continue  # non-convex direction (possible with sigmoid kernels)
                alpha_j_new = np.clip(alpha_j - signs[j] * (error_i - error_j) / eta, low, high)
                if abs(alpha_j_new - alpha_j) < _MIN_ALPHA_STEP:
                    continue
                alpha_i_new = alpha_i + signs[i] * signs[j] * (alpha_j - alpha_j_new)

                delta_i = signs[i] * (alpha_i_new - alpha_i)
                delta_j = signs[j] * (alpha_j_new - alpha_j)
                b1 = bias - error_i - delta_i * gram[i, i] - delta_j * gram[i, j]
                b2 = bias - error_j - delta_i * gram[i, j] - delta_j * gram[j, j]
                if 0.0 < alpha_i_new < self.C:
                    bias_new = b1
                elif 0.0 < alpha_j_new < self.C:
                    bias_new = b2
                else:
                    bias_new = (b1 + b2) / 2.0
                margins += delta_i * gram[i] + delta_j * gram[j] + (bias_new - bias)
                bias = bias_new
                alphas[i], alphas[j] = alpha_i_new, alpha_j_new
                changed += 1
            if violations == 0:
                break
            stalled = stalled + 1 if changed == 0 else 0
            if stalled >= _STALL_LIMIT:
                break

        support = alphas > _SUPPORT_CUTOFF
        self.support_vectors_ = X[support]
        self.dual_coef_ = alphas[support] * signs[support]
        self.intercept_ = float(bias)
        self.gamma_ = gamma
        self.n_features_in_ = f
        self.platt_a_, self.platt_b_ = _fit_platt_scaling(margins, y01)
        return self

    def decision_function(self, X) -> np.ndarray:
        X = check_feature_matrix(X)
        check_n_features(self, X)
        if len(self.support_vectors_) == 0:
            return np.full(len(X), self.intercept_)
        gram = kernel_matrix(
            X, self.support_vectors_, self.kernel, self.gamma_, self.degree, self.coef0
        )
        return gram @ self.dual_coef_ + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        decision = self.decision_function(X)
        p_one = expit(-(self.platt_a_ * decision + self.platt_b_))
        return np.column_stack([1.0 - p_one, p_one])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int64)
