"""Binary classification tree grown greedily on gini or entropy impurity.

Axis-aligned threshold splits on continuous features; candidate thresholds
are midpoints between consecutive distinct sorted values. Leaves predict the
class frequencies of their training samples. Depth and minimum leaf size are
capped because the intended training windows are small.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ._validation import check_feature_matrix, check_n_features, check_X_y

CRITERIA = ("gini", "entropy")


def _impurity(count_one: np.ndarray, total: np.ndarray, criterion: str) -> np.ndarray:
    """Impurity of node(s) from class-1 counts; symmetric in the two classes."""
    p_one = count_one / total
    p_zero = 1.0 - p_one
    if criterion == "gini":
        return 1.0 - (p_zero * p_zero + p_one * p_one)
    log_zero = np.log2(np.where(p_zero > 0, p_zero, 1.0))
    log_one = np.log2(np.where(p_one > 0, p_one, 1.0))
    return -(p_zero * log_zero + p_one * log_one)


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "proba")

    def __init__(self, feature=None, threshold=None, left=None, right=None, proba=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.proba = proba

    @property
    def is_leaf(self) -> bool:
        return self.proba is not None


class DecisionTreeClassifier(ClassifierMixin, BaseEstimator):
    """Greedy binary CART-style tree with a depth cap.

    Parameters:
        criterion: "gini" or "entropy" impurity for split scoring.
        max_depth: maximum tree depth (root is depth 0).
        min_samples_leaf: smallest sample count allowed in a child.
    """

    def __init__(self, criterion: str = "gini", max_depth: int = 5, min_samples_leaf: int = 2):
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, y):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got '{self.criterion}'")
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        self.root_ = self._grow(X, y.astype(float), depth=0)
        return self

    def _leaf(self, y: np.ndarray) -> _Node:
        n = len(y)
        ones = float(y.sum())
        return _Node(proba=np.array([(n - ones) / n, ones / n]))

    def _grow(self, X: np.ndarray, y: np.ndarray, depth: int) -> _Node:
        n = len(y)
        ones = y.sum()
        if depth >= self.max_depth or n < 2 * self.min_samples_leaf or ones in (0.0, float(n)):
            return self._leaf(y)

        split = self._best_split(X, y)
        if split is None:
            return self._leaf(y)
        feature, threshold = split
        mask = X[:, feature] <= threshold
        return _Node(
            feature=feature,
            threshold=threshold,
            left=self._grow(X[mask], y[mask], depth + 1),
            right=self._grow(X[~mask], y[~mask], depth + 1),
        )

    def _best_split(self, X: np.ndarray, y: np.ndarray) -> tuple[int, float] | None:
        """Scan every feature at once; ties break to the first feature, then
        the lowest threshold."""
        n, n_features = X.shape
        order = np.argsort(X, axis=0, kind="stable")
        sorted_x = np.take_along_axis(X, order, axis=0)
        sorted_y = y[order]

        left_ones = np.cumsum(sorted_y, axis=0)[:-1]  # class-1 count left of each cut
        left_sizes = np.arange(1, n)[:, None].astype(float)
        right_sizes = n - left_sizes
        total_ones = y.sum()

        valid = sorted_x[:-1] < sorted_x[1:]
        min_leaf = self.min_samples_leaf
        valid &= (left_sizes >= min_leaf) & (right_sizes >= min_leaf)
        if not valid.any():
            return None

        left_imp = _impurity(left_ones, left_sizes, self.criterion)
        right_imp = _impurity(total_ones - left_ones, right_sizes, self.criterion)
        weighted = (left_sizes * left_imp + right_sizes * right_imp) / n

        parent = _impurity(np.array(total_ones), np.array(float(n)), self.criterion)
        weighted = np.where(valid, weighted, np.inf)
        # Feature-major flat argmin keeps the deterministic tie order.
        flat = np.argmin(weighted.T)
        feature, cut = divmod(flat, n - 1)
        if parent - weighted[cut, feature] <= 0.0:
            return None
        threshold = (sorted_x[cut, feature] + sorted_x[cut + 1, feature]) / 2.0
        return int(feature), float(threshold)

    def predict_proba(self, X) -> np.ndarray:
        X = check_feature_matrix(X)
        check_n_features(self, X)
        out = np.empty((len(X), 2))
        for i, row in enumerate(X):
            node = self.root_
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.proba
        return out

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        return (proba[:, 1] > proba[:, 0]).astype(np.int64)
