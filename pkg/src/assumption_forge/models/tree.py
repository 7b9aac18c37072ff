"""Classification tree with exhaustive gini best splits.

Thresholds sit at midpoints of consecutive distinct sorted feature values.
Implicit zeros of the sparse matrix participate as a block at value zero,
which keeps the per-node scan proportional to the node's stored entries.
Split ties resolve to the lowest feature index, then the lowest threshold;
leaf majority ties resolve to the smallest label value.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..validation import check_X_y, check_dimension, check_fitted
from .base import BaseClassifier


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p * p).sum())


def best_split_for_column(
    values: np.ndarray,
    classes_of_nonzero: np.ndarray,
    node_counts: np.ndarray,
    min_samples_leaf: int,
) -> tuple[float, float] | None:
    """Best (impurity_decrease_numerator, threshold) for one feature column.

    `values` are the nonzero entries in the node, `classes_of_nonzero` their
    class indices; the zero block is reconstructed from `node_counts`. The
    returned score is n * parent_gini - (nL*giniL + nR*giniR), monotone in
    the impurity decrease, so callers can compare without dividing by n.
    """
    k = len(node_counts)
    n = int(node_counts.sum())
    nz_counts = np.zeros(k, dtype=np.int64)
    np.add.at(nz_counts, classes_of_nonzero, 1)
    zero_counts = node_counts - nz_counts

    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    sorted_cls = classes_of_nonzero[order]

    # distinct sorted values with per-class counts, zero block first
    uniq_vals: list[float] = []
    group_counts: list[np.ndarray] = []
    if zero_counts.sum() > 0:
        uniq_vals.append(0.0)
        group_counts.append(zero_counts.astype(np.float64))
    i = 0
    m = len(sorted_vals)
    while i < m:
        j = i
        acc = np.zeros(k, dtype=np.float64)
        while j < m and sorted_vals[j] == sorted_vals[i]:
            acc[sorted_cls[j]] += 1
            j += 1
        uniq_vals.append(float(sorted_vals[i]))
        group_counts.append(acc)
        i = j
    if len(uniq_vals) < 2:
        return None

    total = node_counts.astype(np.float64)
    parent = n * gini(total)
    left = np.zeros(k, dtype=np.float64)
    best: tuple[float, float] | None = None
    for g in range(len(uniq_vals) - 1):
        left += group_counts[g]
        right = total - left
        nl, nr = left.sum(), right.sum()
        if nl < min_samples_leaf or nr < min_samples_leaf:
            continue
        score = parent - (nl * gini(left) + nr * gini(right))
        threshold = (uniq_vals[g] + uniq_vals[g + 1]) / 2.0
        if best is None or score > best[0] + 1e-12:
            best = (score, threshold)
    return best


class GiniTreeClassifier(BaseClassifier):
    def __init__(self, min_samples_split: int = 2, min_samples_leaf: int = 1, max_depth: int | None = None):
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_depth = max_depth
        self.classes_ = None
        # flat arrays: feature < 0 marks a leaf
        self.feature_ = None
        self.threshold_ = None
        self.left_ = None
        self.right_ = None
        self.value_ = None

    def fit(self, X, y) -> "GiniTreeClassifier":
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        self._n_features_ = X.shape[1]
        class_idx = np.searchsorted(self.classes_, y)
        features: list[int] = []
        thresholds: list[float] = []
        lefts: list[int] = []
        rights: list[int] = []
        values: list[np.ndarray] = []

        def new_node() -> int:
            features.append(-1)
            thresholds.append(0.0)
            lefts.append(-1)
            rights.append(-1)
            values.append(np.zeros(len(self.classes_)))
            return len(features) - 1

        root = new_node()
        stack: list[tuple[int, sparse.csr_matrix, np.ndarray, int]] = [(root, X, class_idx, 0)]
        while stack:
            node, Xn, yn, depth = stack.pop()
            counts = np.bincount(yn, minlength=len(self.classes_)).astype(np.int64)
            values[node] = counts.astype(np.float64)
            n = len(yn)
            if (
                n < self.min_samples_split
                or counts.max() == n
                or (self.max_depth is not None and depth >= self.max_depth)
            ):
                continue
            best = self._best_split(Xn.tocsc(), yn, counts)
            if best is None or best[0] <= 1e-12:
                continue
            _, f, threshold = best
            col = np.asarray(Xn[:, [f]].todense()).ravel()
            mask = col <= threshold
            features[node] = f
            thresholds[node] = threshold
            left = new_node()
            right = new_node()
            lefts[node] = left
            rights[node] = right
            stack.append((right, Xn[~mask], yn[~mask], depth + 1))
            stack.append((left, Xn[mask], yn[mask], depth + 1))

        self.feature_ = np.array(features, dtype=np.int64)
        self.threshold_ = np.array(thresholds)
        self.left_ = np.array(lefts, dtype=np.int64)
        self.right_ = np.array(rights, dtype=np.int64)
        self.value_ = np.vstack(values)
        return self

    def _best_split(self, Xc: sparse.csc_matrix, yn: np.ndarray, counts: np.ndarray):
        """Best (score, feature, threshold) of this node, or None.

        Columns holding a single distinct nonzero value (the common case for
        token counts) have exactly one candidate threshold, so they are
        scored in one vectorized pass; the zero block sits on the left.
        Multi-valued columns fall back to the exhaustive per-column scan.
        Ties keep the lowest feature index, then the lowest threshold.
        """
        k = len(counts)
        n = int(counts.sum())
        nnz_per_col = np.diff(Xc.indptr)
        present = np.flatnonzero(nnz_per_col)
        if present.size == 0:
            return None
        starts = Xc.indptr[present]
        ends = Xc.indptr[present + 1]
        col_min = np.minimum.reduceat(Xc.data, starts)
        col_max = np.maximum.reduceat(Xc.data, starts)
        single = col_min == col_max

        best: tuple[float, int, float] | None = None
        parent = n * gini(counts.astype(np.float64))

        single_cols = present[single]
        if single_cols.size:
            # per-class nonzero counts for every present column in one pass;
            # CSC stores entries column by column, so indices align with
            # the repeated column positions
            entry_cols = np.repeat(np.arange(present.size), ends - starts)
            entry_classes = yn[Xc.indices]
            grid = np.zeros((k, present.size), dtype=np.float64)
            np.add.at(grid, (entry_classes, entry_cols), 1.0)
            right = grid[:, single]  # nonzero block
            left = counts[:, None].astype(np.float64) - right
            n_left = left.sum(axis=0)
            n_right = right.sum(axis=0)
            ok = (n_left >= self.min_samples_leaf) & (n_right >= self.min_samples_leaf)
            if ok.any():
                with np.errstate(invalid="ignore", divide="ignore"):
                    gini_left = 1.0 - ((left / np.where(n_left == 0, 1, n_left)) ** 2).sum(axis=0)
                    gini_right = 1.0 - ((right / np.where(n_right == 0, 1, n_right)) ** 2).sum(axis=0)
                scores = parent - (n_left * gini_left + n_right * gini_right)
                scores[~ok] = -np.inf
                pick = int(np.argmax(scores))  # first max = lowest feature index
                if np.isfinite(scores[pick]):
                    feature = int(single_cols[pick])
                    threshold = float(col_min[single][pick]) / 2.0
                    best = (float(scores[pick]), feature, threshold)

        for pos in np.flatnonzero(~single):
            f = int(present[pos])
            lo, hi = Xc.indptr[f], Xc.indptr[f + 1]
            cand = best_split_for_column(
                Xc.data[lo:hi], yn[Xc.indices[lo:hi]], counts, self.min_samples_leaf
            )
            if cand is None:
                continue
            score, threshold = cand
            if (
                best is None
                or score > best[0] + 1e-12
                or (abs(score - best[0]) <= 1e-12 and f < best[1])
            ):
                best = (score, f, threshold)
        return best

    @property
    def node_count(self) -> int:
        return len(self.feature_) if self.feature_ is not None else 0

    def predict(self, X) -> np.ndarray:
        check_fitted(self, "feature_")
        X = check_dimension(X, self._n_features())
        out = np.empty(X.shape[0], dtype=self.classes_.dtype)
        indptr, indices, data = X.indptr, X.indices, X.data
        for row in range(X.shape[0]):
            cols = indices[indptr[row] : indptr[row + 1]]
            vals = data[indptr[row] : indptr[row + 1]]
            lookup = dict(zip(cols.tolist(), vals.tolist()))
            node = 0
            while self.feature_[node] >= 0:
                v = lookup.get(int(self.feature_[node]), 0.0)
                node = self.left_[node] if v <= self.threshold_[node] else self.right_[node]
            out[row] = self.classes_[int(np.argmax(self.value_[node]))]
        return out

    def _n_features(self) -> int:
        return int(self._n_features_)

    def get_state(self) -> dict:
        return {
            "classes": self.classes_,
            "feature": self.feature_,
            "threshold": self.threshold_,
            "left": self.left_,
            "right": self.right_,
            "value": self.value_,
            "n_features": np.array([self._n_features_]),
        }

    def set_state(self, state: dict) -> None:
        self.classes_ = state["classes"]
        self.feature_ = state["feature"]
        self.threshold_ = state["threshold"]
        self.left_ = state["left"]
        self.right_ = state["right"]
        self.value_ = state["value"]
        self._n_features_ = int(state["n_features"][0])
