"""Multinomial logistic regression minimized by limited-memory BFGS."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier


def _log_softmax(z: np.ndarray) -> np.ndarray:
    zmax = z.max(axis=1, keepdims=True)
    shifted = z - zmax
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def lbfgs_minimize(fun, x0: np.ndarray, tol: float, max_iter: int, memory: int = 10):
    """Two-loop-recursion L-BFGS with Armijo backtracking.

    `fun` returns (value, gradient). Stops when the gradient infinity norm
    drops below `tol` or after `max_iter` iterations; returns (x, converged).
    """
    x = x0.copy()
    f, g = fun(x)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    for _ in range(max_iter):
        if np.max(np.abs(g)) < tol:
            return x, True
        q = g.copy()
        alphas = []
        for s, yv, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * yv
        if y_hist:
            ys = y_hist[-1] @ s_hist[-1]
            yy = y_hist[-1] @ y_hist[-1]
            q *= ys / yy
        for (s, yv, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
            b = rho * (yv @ q)
            q += (a - b) * s
        direction = -q
        slope = g @ direction
        if slope >= 0:  # stale curvature, fall back to steepest descent
            direction = -g
            slope = -(g @ g)
        step = 1.0
        f_new, g_new = fun(x + step * direction)
        # Armijo condition with halving
        tries = 0
        while f_new > f + 1e-4 * step * slope and tries < 40:
            step *= 0.5
            tries += 1
            f_new, g_new = fun(x + step * direction)
        if tries >= 40:
            return x, np.max(np.abs(g)) < tol
        s_vec = step * direction
        y_vec = g_new - g
        sy = s_vec @ y_vec
        if sy > 1e-12:
            s_hist.append(s_vec)
            y_hist.append(y_vec)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)
        x = x + s_vec
        f, g = f_new, g_new
    return x, bool(np.max(np.abs(g)) < tol)


class SoftmaxRegression(BaseClassifier):
    """Softmax classifier with L2 penalty of strength 1/(2C) on the weights.

    The intercept column is left unpenalized. Optimization runs from a zero
    start, so refitting with the same data reproduces identical parameters.
    """

    def __init__(self, C: float = 1.0, tol: float = 1e-4, max_iter: int = 10000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.coef_ = None
        self.intercept_ = None
        self.classes_ = None
        self.converged_ = None

    def _pack(self, W: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.concatenate([W.ravel(), b])

    def _unpack(self, theta: np.ndarray, k: int, d: int):
        W = theta[: k * d].reshape(k, d)
        b = theta[k * d :]
        return W, b

    def objective(self, theta: np.ndarray, X: sparse.csr_matrix, Y: np.ndarray):
        """Penalized negative log-likelihood and its gradient."""
        n, d = X.shape
        k = Y.shape[1]
        W, b = self._unpack(theta, k, d)
        Z = X @ W.T + b
        logp = _log_softmax(Z)
        nll = -(Y * logp).sum()
        penalty = (W * W).sum() / (2.0 * self.C)
        P = np.exp(logp)
        G = P - Y
        grad_W = np.asarray((X.T @ G).T) + W / self.C
        grad_b = G.sum(axis=0)
        return nll + penalty, self._pack(grad_W, grad_b)

    def fit(self, X, y) -> "SoftmaxRegression":
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        k = len(self.classes_)
        n, d = X.shape
        Y = np.zeros((n, k))
        for ci, cls in enumerate(self.classes_):
            Y[y == cls, ci] = 1.0
        theta0 = np.zeros(k * d + k)
        theta, converged = lbfgs_minimize(
            lambda t: self.objective(t, X, Y), theta0, self.tol, self.max_iter
        )
        self.coef_, self.intercept_ = self._unpack(theta, k, d)
        self.converged_ = converged
        return self

    def decision_function(self, X) -> np.ndarray:
        check_fitted(self, "coef_")
        X = check_dimension(X, self.coef_.shape[1])
        return np.asarray(X @ self.coef_.T + self.intercept_)

    def predict_proba(self, X) -> np.ndarray:
        return np.exp(_log_softmax(self.decision_function(X)))

    def predict(self, X) -> np.ndarray:
        return self.classes_[self._argmax_rows(self.decision_function(X))]

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
