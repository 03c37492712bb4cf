"""Agent-identity classifiers: three model families behind one estimator API.

Everything here follows the fit / predict / predict_proba convention with
get_params-compatible constructors, so the estimators compose with standard
tooling while the training algorithms themselves are implemented in this
package.
"""

from .logistic import LogisticRegression
from .model_selection import GridSearchCV, grid_search_cv, stratified_fold_indices
from .scaling import StandardScaler, standardize
from .specs import ClassifierSpec, build_estimator, canonical_specs
from .svm import SVC
from .tree import DecisionTreeClassifier

__all__ = [
    "ClassifierSpec",
    "DecisionTreeClassifier",
    "GridSearchCV",
    "LogisticRegression",
    "SVC",
    "StandardScaler",
    "build_estimator",
    "canonical_specs",
    "grid_search_cv",
    "predict_proba",
    "standardize",
    "stratified_fold_indices",
    "train_classifier",
]


def train_classifier(spec: ClassifierSpec, X, y, hyper: dict, seed: int = 0):
    """Fit one estimator for an explicit grid point."""
    return build_estimator(spec, hyper, seed=seed).fit(X, y)


def predict_proba(model, X):
    """Per-row class probabilities; rows sum to 1."""
    return model.predict_proba(X)
