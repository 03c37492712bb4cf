"""Per-column z-scoring with reusable train-set statistics."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_feature_matrix, check_n_features

#: Columns with (population) standard deviation below this pass through
#: centered only, so constant features do not blow up.
DEGENERATE_STD = 1e-12


class StandardScaler(TransformerMixin, BaseEstimator):
    """Center to the train mean and scale by the train standard deviation.

    Uses the population (ddof=0) standard deviation. Degenerate columns are
    centered but not scaled.
    """

    def fit(self, X, y=None):
        X = check_feature_matrix(X)
        if X.shape[0] < 2:
            raise ValueError("need at least 2 rows to fit a scaler")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std < DEGENERATE_STD, 1.0, std)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = check_feature_matrix(X)
        check_n_features(self, X)
        return (X - self.mean_) / self.scale_


def standardize(X) -> tuple[StandardScaler, np.ndarray]:
    """Fit a scaler on X and return it with the transformed matrix."""
    scaler = StandardScaler().fit(X)
    return scaler, scaler.transform(X)
