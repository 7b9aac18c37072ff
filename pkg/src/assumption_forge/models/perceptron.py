"""One-vs-all perceptron with online Rosenblatt updates."""

from __future__ import annotations

import numpy as np

from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier


class PerceptronOvA(BaseClassifier):
    """Binary threshold unit per class, trained online with seeded shuffles.

    Each unit sees targets in {0, 1}; a sample updates the weights by
    eta0 * (target - output) * x whenever the unit misfires. Training stops
    at max_iter epochs or once the epoch error rate has failed to improve
    by at least tol for n_iter_no_change consecutive epochs.
    """

    def __init__(
        self,
        eta0: float = 1.0,
        max_iter: int = 1000,
        tol: float = 1e-3,
        shuffle: bool = True,
        random_state: int = 0,
        n_iter_no_change: int = 5,
    ):
        self.eta0 = eta0
        self.max_iter = max_iter
        self.tol = tol
        self.shuffle = shuffle
        self.random_state = random_state
        self.n_iter_no_change = n_iter_no_change
        self.coef_ = None
        self.intercept_ = None
        self.classes_ = None
        self.converged_ = None

    def fit(self, X, y) -> "PerceptronOvA":
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        n, d = X.shape
        self.coef_ = np.zeros((len(self.classes_), d))
        self.intercept_ = np.zeros(len(self.classes_))
        self.converged_ = True
        indptr, indices, data = X.indptr, X.indices, X.data
        for ci, cls in enumerate(self.classes_):
            targets = (y == cls).astype(np.float64)
            # every one-vs-all unit sees the same epoch shuffles, which keeps
            # training equivariant under class relabeling
            rng = np.random.Generator(np.random.PCG64(self.random_state))
            w = self.coef_[ci]
            b = 0.0
            best_err = np.inf
            stale = 0
            epochs = 0
            for _ in range(self.max_iter):
                epochs += 1
                order = np.arange(n)
                if self.shuffle:
                    rng.shuffle(order)
                mistakes = 0
                for row in order:
                    lo, hi = indptr[row], indptr[row + 1]
                    cols = indices[lo:hi]
                    vals = data[lo:hi]
                    out = 1.0 if (w[cols] @ vals + b) > 0.0 else 0.0
                    err = targets[row] - out
                    if err != 0.0:
                        mistakes += 1
                        w[cols] += self.eta0 * err * vals
                        b += self.eta0 * err
                rate = mistakes / n
                if rate < best_err - self.tol:
                    best_err = rate
                    stale = 0
                else:
                    stale += 1
                    if stale >= self.n_iter_no_change:
                        break
                if mistakes == 0:
                    break
            else:
                self.converged_ = False
            self.intercept_[ci] = b
        return self

    def decision_function(self, X) -> np.ndarray:
        check_fitted(self, "coef_")
        X = check_dimension(X, self.coef_.shape[1])
        return X @ self.coef_.T + self.intercept_

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        return self.classes_[self._argmax_rows(scores)]

    def get_state(self) -> dict:
        return {
            "coef": self.coef_,
            "intercept": self.intercept_,
            "classes": self.classes_,
            "converged": np.array([self.converged_]),
        }

    def set_state(self, state: dict) -> None:
        self.coef_ = state["coef"]
        self.intercept_ = state["intercept"]
        self.classes_ = state["classes"]
        self.converged_ = bool(state["converged"][0])
