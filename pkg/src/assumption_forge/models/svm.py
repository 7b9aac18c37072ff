"""Soft-margin SVM trained by sequential minimal optimisation.

Multiclass handling is one-vs-one: one binary machine per class pair, with
majority voting shaped into per-class scores. Each binary dual

    min_a  0.5 a^T Q a - e^T a,   0 <= a_i <= C,  y^T a = 0,
    Q_ij = y_i y_j K(x_i, x_j),   K(x, z) = exp(-gamma ||x - z||^2)

is solved with the maximal-violating-pair working set refined by a
second-order gain heuristic, stopping once the KKT gap falls below tol.
Kernel rows are computed on demand and cached.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..errors import DegenerateData
from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier

_TAU = 1e-12


def scale_gamma(X: sparse.csr_matrix) -> float:
    """gamma = 1 / (n_features * Var(X)) over all matrix entries."""
    n, d = X.shape
    total = n * d
    mean = X.sum() / total
    mean_sq = X.multiply(X).sum() / total
    var = mean_sq - mean * mean
    if var <= 0:
        var = 1.0
    return 1.0 / (d * var)


class _KernelCache:
    """RBF rows against the working training set, keyed by sample index."""

    def __init__(self, X: sparse.csr_matrix, gamma: float, capacity: int = 512):
        self.X = X
        self.gamma = gamma
        self.sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        self.capacity = capacity
        self._rows: dict[int, np.ndarray] = {}
        self._order: list[int] = []

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            return cached
        xi = self.X[i]
        cross = np.asarray((self.X @ xi.T).todense()).ravel()
        d2 = self.sq + self.sq[i] - 2.0 * cross
        np.maximum(d2, 0.0, out=d2)
        row = np.exp(-self.gamma * d2)
        self._rows[i] = row
        self._order.append(i)
        if len(self._order) > self.capacity:
            evict = self._order.pop(0)
            self._rows.pop(evict, None)
        return row


def smo_solve(
    K_row,
    y: np.ndarray,
    C: float,
    tol: float,
    max_iter: int = -1,
) -> tuple[np.ndarray, float, int, bool]:
    """Solve one binary dual; returns (alpha, bias, iterations, converged).

    `K_row(i)` yields row i of the kernel matrix. Follows the working-set
    scheme of standard SMO solvers: the first index maximizes the KKT
    violation, the second maximizes the guaranteed objective decrease.
    """
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0
    cap = max_iter if max_iter > 0 else 100 * max(n, 1000)
    it = 0
    converged = False
    while it < cap:
        it += 1
        yg = -y * grad
        up = (y > 0) & (alpha < C) | (y < 0) & (alpha > 0)
        low = (y > 0) & (alpha > 0) | (y < 0) & (alpha < C)
        if not up.any() or not low.any():
            converged = True
            break
        m_val = yg[up].max()
        i = np.flatnonzero(up)[int(np.argmax(yg[up]))]
        M_val = yg[low].min()
        if m_val - M_val <= tol:
            converged = True
            break
        Ki = K_row(i)
        # second-order selection of j among violators
        low_idx = np.flatnonzero(low & (yg < m_val - _TAU))
        if low_idx.size == 0:
            low_idx = np.flatnonzero(low)
        b_vals = m_val - yg[low_idx]
        # RBF diagonal is 1, so the pair curvature is 2 - 2 y_i y_t K_it
        a_vals = 2.0 - 2.0 * Ki[low_idx] * y[i] * y[low_idx]
        a_vals = np.where(a_vals <= 0, _TAU, a_vals)
        gains = (b_vals * b_vals) / a_vals
        j = low_idx[int(np.argmax(gains))]
        Kj = K_row(j)

        # analytic pair update with box clipping
        quad = Ki[i] + Kj[j] - 2.0 * Ki[j] * y[i] * y[j]
        if quad <= 0:
            quad = _TAU
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            ai = alpha[i] + delta
            aj = alpha[j] + delta
            if diff > 0 and aj < 0:
                ai, aj = diff, 0.0
            elif diff <= 0 and ai < 0:
                ai, aj = 0.0, -diff
            if ai > C:
                aj = aj - (ai - C)
                ai = C
            if aj > C:
                ai = ai - (aj - C)
                aj = C
        else:
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            ai = alpha[i] - delta
            aj = alpha[j] + delta
            if ai < 0:
                ai, aj = 0.0, total
            elif aj < 0:
                ai, aj = total, 0.0
            if ai > C:
                ai, aj = C, total - C
            elif aj > C:
                ai, aj = total - C, C
        dai = ai - alpha[i]
        daj = aj - alpha[j]
        alpha[i], alpha[j] = ai, aj
        grad += Ki * (y[i] * y * dai) + Kj * (y[j] * y * daj)

    # bias from free support vectors, else the violation midpoint
    yg = -y * grad
    free = (alpha > _TAU) & (alpha < C - _TAU)
    if free.any():
        b = float(yg[free].mean())
    else:
        up = (y > 0) & (alpha < C) | (y < 0) & (alpha > 0)
        low = (y > 0) & (alpha > 0) | (y < 0) & (alpha < C)
        hi = yg[up].max() if up.any() else 0.0
        lo = yg[low].min() if low.any() else 0.0
        b = float((hi + lo) / 2.0)
    return alpha, b, it, converged


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """0.5 a^T Q a - e^T a for a full kernel matrix (tests and oracles)."""
    Q = K * np.outer(y, y)
    return float(0.5 * alpha @ Q @ alpha - alpha.sum())


class KernelSVM(BaseClassifier):
    def __init__(
        self,
        C: float = 1.0,
        gamma: str | float = "scale",
        tol: float = 1e-3,
        max_iter: int = -1,
        cache_rows: int = 512,
    ):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter
        self.cache_rows = cache_rows
        self.classes_ = None
        self.machines_ = None
        self.gamma_ = None
        self.converged_ = None

    def fit(self, X, y) -> "KernelSVM":
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise DegenerateData("SVM requires at least two classes")
        self.gamma_ = scale_gamma(X) if self.gamma == "scale" else float(self.gamma)
        self.machines_ = []
        self.converged_ = True
        for a_idx in range(len(self.classes_)):
            for b_idx in range(a_idx + 1, len(self.classes_)):
                ca, cb = self.classes_[a_idx], self.classes_[b_idx]
                mask = (y == ca) | (y == cb)
                rows = np.flatnonzero(mask)
                Xp = X[rows]
                yp = np.where(y[rows] == ca, 1.0, -1.0)
                cache = _KernelCache(Xp, self.gamma_, capacity=self.cache_rows)
                alpha, b, _, ok = smo_solve(cache.row, yp, self.C, self.tol, self.max_iter)
                self.converged_ = self.converged_ and ok
                sv = alpha > _TAU
                self.machines_.append(
                    {
                        "classes": (int(ca), int(cb)),
                        "support": Xp[sv],
                        "coef": alpha[sv] * yp[sv],
                        "bias": b,
                    }
                )
        return self

    def _pair_decision(self, machine, X: sparse.csr_matrix) -> np.ndarray:
        S = machine["support"]
        s_sq = np.asarray(S.multiply(S).sum(axis=1)).ravel()
        x_sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        cross = np.asarray((X @ S.T).todense())
        d2 = x_sq[:, None] + s_sq[None, :] - 2.0 * cross
        np.maximum(d2, 0.0, out=d2)
        K = np.exp(-self.gamma_ * d2)
        return K @ machine["coef"] + machine["bias"]

    def decision_function(self, X) -> np.ndarray:
        """Per-class vote totals (one-vs-one reshaped over the class axis)."""
        check_fitted(self, "machines_")
        d = self.machines_[0]["support"].shape[1]
        X = check_dimension(X, d)
        votes = np.zeros((X.shape[0], len(self.classes_)))
        class_pos = {int(c): i for i, c in enumerate(self.classes_)}
        for machine in self.machines_:
            scores = self._pair_decision(machine, X)
            ca, cb = machine["classes"]
            winners = np.where(scores > 0, class_pos[ca], class_pos[cb])
            for pos in (class_pos[ca], class_pos[cb]):
                votes[:, pos] += (winners == pos).astype(np.float64)
        return votes

    def predict(self, X) -> np.ndarray:
        return self.classes_[self._argmax_rows(self.decision_function(X))]

    def get_state(self) -> dict:
        state = {
            "classes": self.classes_,
            "gamma": np.array([self.gamma_]),
            "n_machines": np.array([len(self.machines_)]),
            "converged": np.array([self.converged_]),
        }
        for idx, m in enumerate(self.machines_):
            S = m["support"].tocsr()
            state[f"m{idx}_classes"] = np.array(m["classes"])
            state[f"m{idx}_coef"] = m["coef"]
            state[f"m{idx}_bias"] = np.array([m["bias"]])
            state[f"m{idx}_data"] = S.data
            state[f"m{idx}_indices"] = S.indices
            state[f"m{idx}_indptr"] = S.indptr
            state[f"m{idx}_shape"] = np.array(S.shape)
        return state

    def set_state(self, state: dict) -> None:
        self.classes_ = state["classes"]
        self.gamma_ = float(state["gamma"][0])
        self.converged_ = bool(state["converged"][0])
        self.machines_ = []
        for idx in range(int(state["n_machines"][0])):
            support = sparse.csr_matrix(
                (state[f"m{idx}_data"], state[f"m{idx}_indices"], state[f"m{idx}_indptr"]),
                shape=tuple(state[f"m{idx}_shape"]),
            )
            self.machines_.append(
                {
                    "classes": tuple(int(v) for v in state[f"m{idx}_classes"]),
                    "support": support,
                    "coef": state[f"m{idx}_coef"],
                    "bias": float(state[f"m{idx}_bias"][0]),
                }
            )
