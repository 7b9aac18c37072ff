"""Model zoo: specs, construction, training facade and persistence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from ..validation import as_csr
from ..vectorize import FeatureVector
from .base import BaseClassifier
from .io import read_container, write_container
from .knn import KNearestNeighbors
from .lda import LinearDiscriminant
from .logistic import SoftmaxRegression
from .naive_bayes import BernoulliNaiveBayes
from .perceptron import PerceptronOvA
from .svm import KernelSVM, smo_solve, dual_objective, scale_gamma
from .tree import GiniTreeClassifier, gini

ALGORITHMS = ("Pct", "LR", "LDA", "KNN", "SVM", "NB", "CART")

DEFAULT_PARAMS: dict[str, dict] = {
    "Pct": {"eta0": 1.0, "max_iter": 1000, "tol": 1e-3, "shuffle": True, "n_iter_no_change": 5},
    "LR": {"C": 1.0, "tol": 1e-4, "max_iter": 10000},
    "LDA": {"tol": 1e-4},
    "KNN": {"k": 5, "p": 2},
    "SVM": {"C": 1.0, "gamma": "scale", "tol": 1e-3, "max_iter": -1},
    "NB": {"alpha": 1.0, "binarize": 0.0, "fit_prior": True},
    "CART": {"min_samples_split": 2, "min_samples_leaf": 1, "max_depth": None},
}

# Feature budget per algorithm: dense-algebra and kernel models get a capped
# vocabulary, the rest see the full feature space.
CAPPED_ALGORITHMS = {"LDA", "KNN", "SVM"}
DEFAULT_FEATURE_CAP = 5000


@dataclass(frozen=True)
class ModelSpec:
    algorithm: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        name = canonical_name(self.algorithm)
        object.__setattr__(self, "algorithm", name)
        unknown = set(self.params) - set(DEFAULT_PARAMS[name])
        if unknown:
            raise ValueError(f"unknown {name} parameters: {sorted(unknown)}")

    def resolved_params(self) -> dict:
        merged = dict(DEFAULT_PARAMS[self.algorithm])
        merged.update(self.params)
        return merged

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "params": self.resolved_params()}


def canonical_name(name: str) -> str:
    lookup = {a.lower(): a for a in ALGORITHMS}
    key = name.strip().lower()
    if key not in lookup:
        raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
    return lookup[key]


def build_estimator(spec: ModelSpec, seed: int = 0) -> BaseClassifier:
    params = spec.resolved_params()
    if spec.algorithm == "Pct":
        return PerceptronOvA(random_state=seed, **params)
    if spec.algorithm == "LR":
        return SoftmaxRegression(**params)
    if spec.algorithm == "LDA":
        return LinearDiscriminant(**params)
    if spec.algorithm == "KNN":
        return KNearestNeighbors(**params)
    if spec.algorithm == "SVM":
        return KernelSVM(**params)
    if spec.algorithm == "NB":
        return BernoulliNaiveBayes(**params)
    return GiniTreeClassifier(**params)


@dataclass
class TrainedModel:
    """Fitted estimator plus everything needed to reproduce its predictions."""

    spec: ModelSpec
    estimator: BaseClassifier
    seed: int = 0
    feature_map_hash: str = ""

    @property
    def classes(self) -> list[int]:
        return [int(c) for c in self.estimator.classes_]

    def _coerce(self, x):
        if isinstance(x, FeatureVector):
            return x.to_csr()
        return as_csr(x)

    def predict(self, x) -> np.ndarray:
        return self.estimator.predict(self._coerce(x))

    def predict_one(self, x) -> int:
        return int(self.predict(x)[0])

    def save(self, path) -> None:
        header = {
            "algorithm": self.spec.algorithm,
            "params": _jsonable(self.spec.resolved_params()),
            "seed": self.seed,
            "feature_map_hash": self.feature_map_hash,
            "classes": self.classes,
        }
        write_container(path, header, self.estimator.get_state())

    @classmethod
    def load(cls, path) -> "TrainedModel":
        header, arrays = read_container(path)
        spec = ModelSpec(header["algorithm"], _unjsonable(header["params"]))
        model = cls(
            spec=spec,
            estimator=build_estimator(spec, seed=header.get("seed", 0)),
            seed=header.get("seed", 0),
            feature_map_hash=header.get("feature_map_hash", ""),
        )
        model.estimator.set_state(arrays)
        return model


def _jsonable(params: dict) -> dict:
    return {k: (v if not isinstance(v, float) or np.isfinite(v) else str(v)) for k, v in params.items()}


def _unjsonable(params: dict) -> dict:
    return dict(params)


def fit(spec: ModelSpec, train, seed: int = 0) -> TrainedModel:
    """Train per spec on (X, y) or a list of (FeatureVector, label) pairs."""
    if isinstance(train, tuple) and len(train) == 2:
        X, y = train
    else:
        pairs = list(train)
        if not pairs:
            raise DimensionMismatch("empty training set")
        from scipy import sparse

        X = sparse.vstack([fv.to_csr() for fv, _ in pairs])
        y = [label for _, label in pairs]
    estimator = build_estimator(spec, seed=seed)
    estimator.fit(X, y)
    return TrainedModel(spec=spec, estimator=estimator, seed=seed)


__all__ = [
    "ALGORITHMS",
    "DEFAULT_PARAMS",
    "CAPPED_ALGORITHMS",
    "DEFAULT_FEATURE_CAP",
    "ModelSpec",
    "TrainedModel",
    "build_estimator",
    "canonical_name",
    "fit",
    "BaseClassifier",
    "PerceptronOvA",
    "SoftmaxRegression",
    "LinearDiscriminant",
    "KNearestNeighbors",
    "KernelSVM",
    "BernoulliNaiveBayes",
    "GiniTreeClassifier",
    "smo_solve",
    "dual_objective",
    "scale_gamma",
    "gini",
]
