"""Seeded stratified cross-validation and exhaustive grid search."""

from __future__ import annotations

import numpy as np

from ._validation import check_X_y
from .specs import ClassifierSpec, build_estimator


def stratified_fold_indices(
    y: np.ndarray, n_folds: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Split sample indices into n_folds with both classes in every fold.

    Each class is shuffled independently and dealt round-robin, so fold sizes
    differ by at most one per class. Deterministic for a given generator state.
    """
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for cls in (0, 1):
        members = np.flatnonzero(y == cls)
        if len(members) < n_folds:
            raise ValueError(
                f"class {cls} has {len(members)} samples; "
                f"stratified {n_folds}-fold split needs at least {n_folds}"
            )
        for position, sample in enumerate(rng.permutation(members)):
            folds[position % n_folds].append(int(sample))
    return [np.sort(np.asarray(fold)) for fold in folds]


def _child_seed(seed: int, *branch: int) -> int:
    return int(np.random.SeedSequence([seed, *branch]).generate_state(1)[0])


class GridSearchCV:
    """Pick the grid point with the best mean fold accuracy, then refit on all data.

    Fold assignment is seeded and shared across grid points; score ties break
    to the earlier grid point. After fit: best_estimator_, best_params_,
    best_score_, and cv_scores_ (mean accuracy per grid point).
    """

    def __init__(self, spec: ClassifierSpec, folds: int = 5, seed: int = 0):
        self.spec = spec
        self.folds = folds
        self.seed = seed

    def fit(self, X, y) -> "GridSearchCV":
        X, y = check_X_y(X, y)
        if len(y) < self.folds:
            raise ValueError(f"need at least {self.folds} samples for {self.folds} folds")
        fold_indices = stratified_fold_indices(
            y, self.folds, np.random.default_rng(self.seed)
        )
        all_indices = np.arange(len(y))

        self.cv_scores_ = []
        best_index = -1
        best_score = -np.inf
        for gi, hyper in enumerate(self.spec.hyper_grid):
            fold_scores = []
            for fi, val_idx in enumerate(fold_indices):
                train_idx = np.setdiff1d(all_indices, val_idx, assume_unique=True)
                model = build_estimator(self.spec, hyper, seed=_child_seed(self.seed, gi, fi))
                model.fit(X[train_idx], y[train_idx])
                fold_scores.append(float(np.mean(model.predict(X[val_idx]) == y[val_idx])))
            mean_score = float(np.mean(fold_scores))
            self.cv_scores_.append(mean_score)
            if mean_score > best_score:
                best_score = mean_score
                best_index = gi

        self.best_score_ = best_score
        self.best_index_ = best_index
        self.best_params_ = dict(self.spec.hyper_grid[best_index])
        self.best_estimator_ = build_estimator(
            self.spec, self.best_params_, seed=_child_seed(self.seed, best_index, self.folds)
        ).fit(X, y)
        return self

    def predict(self, X):
        return self.best_estimator_.predict(X)

    def predict_proba(self, X):
        return self.best_estimator_.predict_proba(X)


def grid_search_cv(spec: ClassifierSpec, X, y, folds: int = 5, seed: int = 0):
    """Functional form: return the refit best estimator only."""
    return GridSearchCV(spec, folds=folds, seed=seed).fit(X, y).best_estimator_
