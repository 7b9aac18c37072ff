"""Linear discriminant analysis via singular value decomposition.

The shared within-class covariance is never formed explicitly: centered,
scaled training data is decomposed, and its right singular vectors whiten
the feature space. Classification picks the class maximizing the Gaussian
discriminant (negative whitened distance to the class mean plus log prior).
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateData
from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier


class LinearDiscriminant(BaseClassifier):
    def __init__(self, tol: float = 1e-4):
        self.tol = tol
        self.means_ = None
        self.priors_ = None
        self.scalings_ = None
        self.classes_ = None

    def fit(self, X, y) -> "LinearDiscriminant":
        X, y = check_X_y(X, y)
        Xd = np.asarray(X.todense(), dtype=np.float64)
        self.classes_ = np.unique(y)
        k = len(self.classes_)
        if k < 2:
            raise DegenerateData("LDA requires at least two classes")
        n, d = Xd.shape
        means = np.vstack([Xd[y == c].mean(axis=0) for c in self.classes_])
        priors = np.array([(y == c).mean() for c in self.classes_])

        centered = Xd - means[np.searchsorted(self.classes_, y)]
        std = centered.std(axis=0)
        std[std == 0] = 1.0
        fac = 1.0 / max(n - k, 1)
        Xs = np.sqrt(fac) * (centered / std)
        _, S, Vt = np.linalg.svd(Xs, full_matrices=False)
        rank = int((S > self.tol).sum())
        if rank == 0:
            raise DegenerateData("within-class scatter has rank zero")
        # columns map feature space into whitened coordinates
        self.scalings_ = (Vt[:rank] / std).T / S[:rank]
        self.means_ = means
        self.priors_ = priors
        return self

    def decision_function(self, X) -> np.ndarray:
        check_fitted(self, "scalings_")
        X = check_dimension(X, self.means_.shape[1])
        Z = np.asarray(X @ self.scalings_)
        M = self.means_ @ self.scalings_
        # -(1/2)||z - m_c||^2 + log prior, expanded so X is touched once
        cross = Z @ M.T
        norms = 0.5 * (M * M).sum(axis=1)
        return cross - norms + np.log(self.priors_)

    def predict(self, X) -> np.ndarray:
        return self.classes_[self._argmax_rows(self.decision_function(X))]

    def get_state(self) -> dict:
        return {
            "means": self.means_,
            "priors": self.priors_,
            "scalings": self.scalings_,
            "classes": self.classes_,
        }

    def set_state(self, state: dict) -> None:
        self.means_ = state["means"]
        self.priors_ = state["priors"]
        self.scalings_ = state["scalings"]
        self.classes_ = state["classes"]
