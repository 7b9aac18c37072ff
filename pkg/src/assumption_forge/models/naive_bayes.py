"""Bernoulli naive Bayes over features binarized at a threshold."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier


class BernoulliNaiveBayes(BaseClassifier):
    """Event model: presence/absence of each feature, Laplace-smoothed.

    theta[c, f] = (count of f in class c + alpha) / (n_c + 2 alpha); class
    priors are empirical when fit_prior is set, uniform otherwise.
    """

    def __init__(self, alpha: float = 1.0, binarize: float = 0.0, fit_prior: bool = True):
        self.alpha = alpha
        self.binarize = binarize
        self.fit_prior = fit_prior
        self.classes_ = None
        self.feature_log_prob_ = None
        self.feature_log_neg_ = None
        self.class_log_prior_ = None

    def _binarized(self, X: sparse.csr_matrix) -> sparse.csr_matrix:
        B = X.copy()
        B.data = (B.data > self.binarize).astype(np.float64)
        B.eliminate_zeros()
        return B

    def fit(self, X, y) -> "BernoulliNaiveBayes":
        X, y = check_X_y(X, y)
        B = self._binarized(X)
        self.classes_ = np.unique(y)
        k = len(self.classes_)
        n, d = B.shape
        counts = np.zeros((k, d))
        sizes = np.zeros(k)
        for ci, cls in enumerate(self.classes_):
            rows = np.flatnonzero(y == cls)
            sizes[ci] = len(rows)
            counts[ci] = np.asarray(B[rows].sum(axis=0)).ravel()
        theta = (counts + self.alpha) / (sizes[:, None] + 2.0 * self.alpha)
        self.feature_log_prob_ = np.log(theta)
        self.feature_log_neg_ = np.log1p(-theta)
        if self.fit_prior:
            self.class_log_prior_ = np.log(sizes / n)
        else:
            self.class_log_prior_ = np.full(k, -np.log(k))
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        check_fitted(self, "feature_log_prob_")
        X = check_dimension(X, self.feature_log_prob_.shape[1])
        B = self._binarized(X)
        base = self.feature_log_neg_.sum(axis=1)  # all-absent baseline per class
        delta = (self.feature_log_prob_ - self.feature_log_neg_).T
        return np.asarray(B @ delta) + base + self.class_log_prior_

    def predict_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        jll -= jll.max(axis=1, keepdims=True)
        p = np.exp(jll)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return self.classes_[self._argmax_rows(self.joint_log_likelihood(X))]

    def get_state(self) -> dict:
        return {
            "classes": self.classes_,
            "flp": self.feature_log_prob_,
            "fln": self.feature_log_neg_,
            "prior": self.class_log_prior_,
        }

    def set_state(self, state: dict) -> None:
        self.classes_ = state["classes"]
        self.feature_log_prob_ = state["flp"]
        self.feature_log_neg_ = state["fln"]
        self.class_log_prior_ = state["prior"]
