"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np


def check_feature_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got ndim={X.ndim}")
    if X.shape[0] == 0:
        raise ValueError("empty feature matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite entries")
    return X


def check_binary_labels(y, require_both_classes: bool = True) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("labels must be a 1-D vector")
    values = set(np.unique(y).tolist())
    if not values <= {0, 1}:
        raise ValueError(f"labels must be in {{0, 1}}, got {sorted(values)}")
    if require_both_classes and values != {0, 1}:
        raise ValueError("training labels must contain both classes")
    return y.astype(np.int64)


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = check_feature_matrix(X)
    y = check_binary_labels(y)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    return X, y


def check_n_features(estimator, X: np.ndarray) -> None:
    expected = getattr(estimator, "n_features_in_", None)
    if expected is None:
        raise ValueError(f"{type(estimator).__name__} is not fitted")
    if X.shape[1] != expected:
        raise ValueError(
            f"{type(estimator).__name__} was fitted with {expected} features, "
            f"got {X.shape[1]}"
        )
