"""k-nearest-neighbors with Euclidean distance and uniform votes."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier


class KNearestNeighbors(BaseClassifier):
    """Lazy learner: fit stores the training set.

    Neighbor selection is fully deterministic: candidates order by
    (distance, training index), and vote ties resolve to the smallest
    label value.
    """

    def __init__(self, k: int = 5, p: int = 2):
        self.k = k
        self.p = p  # Minkowski exponent; 2 = Euclidean
        self.X_ = None
        self.y_ = None
        self.classes_ = None

    def fit(self, X, y) -> "KNearestNeighbors":
        X, y = check_X_y(X, y)
        if self.p != 2:
            raise ValueError("only the Euclidean case (p=2) is implemented")
        self.X_ = X
        self.y_ = y
        self.classes_ = np.unique(y)
        self._sq_norms = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        return self

    def _distances(self, Q: sparse.csr_matrix) -> np.ndarray:
        q_norms = np.asarray(Q.multiply(Q).sum(axis=1)).ravel()
        cross = np.asarray((Q @ self.X_.T).todense())
        d2 = q_norms[:, None] + self._sq_norms[None, :] - 2.0 * cross
        np.maximum(d2, 0.0, out=d2)
        return d2

    def predict(self, X, chunk: int = 512) -> np.ndarray:
        check_fitted(self, "X_")
        X = check_dimension(X, self.X_.shape[1])
        n_train = self.X_.shape[0]
        k = min(self.k, n_train)
        out = np.empty(X.shape[0], dtype=self.y_.dtype)
        for start in range(0, X.shape[0], chunk):
            block = X[start : start + chunk]
            d2 = self._distances(block)
            # stable sort ties by training index
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            for i in range(nearest.shape[0]):
                votes = np.zeros(len(self.classes_), dtype=np.int64)
                for t in nearest[i]:
                    votes[np.searchsorted(self.classes_, self.y_[t])] += 1
                out[start + i] = self.classes_[int(np.argmax(votes))]
        return out

    def get_state(self) -> dict:
        return {
            "X_data": self.X_.data,
            "X_indices": self.X_.indices,
            "X_indptr": self.X_.indptr,
            "X_shape": np.array(self.X_.shape),
            "y": self.y_,
            "classes": self.classes_,
        }

    def set_state(self, state: dict) -> None:
        self.X_ = sparse.csr_matrix(
            (state["X_data"], state["X_indices"], state["X_indptr"]),
            shape=tuple(state["X_shape"]),
        )
        self.y_ = state["y"]
        self.classes_ = state["classes"]
        self._sq_norms = np.asarray(self.X_.multiply(self.X_).sum(axis=1)).ravel()
