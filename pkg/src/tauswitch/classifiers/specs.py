"""The canonical classifier configurations and their hyperparameter grids.

Nine setups exist: four SVM kernels, two tree splitting criteria, and three
logistic-regression penalties. Grids are small and fixed; grid order is part
of the contract because grid-search ties break to the earlier point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .logistic import LogisticRegression, PENALTIES
from .svm import KERNELS, SVC
from .tree import CRITERIA, DecisionTreeClassifier

FAMILIES = ("svm", "tree", "logreg")

_SVM_C = (0.1, 1.0, 10.0)
_RBF_GAMMA = (0.1, 1.0)
_LOGREG_STRENGTH = (0.01, 0.1, 1.0, 10.0)
_ELASTICNET_RATIO = (0.25, 0.5, 0.75)

#: Fixed tree regularization: small training windows overfit unbounded trees.
TREE_MAX_DEPTH = 5
TREE_MIN_LEAF = 2


def _default_grid(family: str, variant: str) -> tuple[dict, ...]:
    if family == "svm":
        if variant == "rbf":
            return tuple({"C": c, "gamma": g} for c in _SVM_C for g in _RBF_GAMMA)
        return tuple({"C": c} for c in _SVM_C)
    if family == "tree":
        return ({},)
    if variant == "elasticnet":
        return tuple(
            {"strength": s, "l1_ratio": r}
            for s in _LOGREG_STRENGTH
            for r in _ELASTICNET_RATIO
        )
    return tuple({"strength": s} for s in _LOGREG_STRENGTH)


_VARIANTS = {"svm": KERNELS, "tree": CRITERIA, "logreg": PENALTIES}


@dataclass(frozen=True)
class ClassifierSpec:
    """One classifier family/variant plus its candidate hyperparameters."""

    family: str
    variant: str
    hyper_grid: tuple[dict, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got '{self.family}'")
        if self.variant not in _VARIANTS[self.family]:
            raise ValueError(
                f"variant '{self.variant}' is not legal for family '{self.family}'"
            )
        if not self.hyper_grid:
            object.__setattr__(self, "hyper_grid", _default_grid(self.family, self.variant))

    @property
    def name(self) -> str:
        return f"{self.family}/{self.variant}"


def canonical_specs() -> list[ClassifierSpec]:
    """The nine standard setups: 4 SVM kernels + 2 tree criteria + 3 penalties."""
    return (
        [ClassifierSpec("svm", kernel) for kernel in KERNELS]
        + [ClassifierSpec("tree", criterion) for criterion in CRITERIA]
        + [ClassifierSpec("logreg", penalty) for penalty in PENALTIES]
    )


def build_estimator(spec: ClassifierSpec, hyper: dict, seed: int = 0):
    """Instantiate an unfitted estimator for one grid point."""
    if spec.family == "svm":
        return SVC(kernel=spec.variant, random_state=seed, **hyper)
    if spec.family == "tree":
        return DecisionTreeClassifier(
            criterion=spec.variant,
            max_depth=TREE_MAX_DEPTH,
            min_samples_leaf=TREE_MIN_LEAF,
            **hyper,
        )
    return LogisticRegression(penalty=spec.variant, **hyper)
