"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .errors import DegenerateData, DimensionMismatch


def as_csr(X) -> sparse.csr_matrix:
    """Coerce a matrix-like (dense array, sparse, list of lists) to CSR float64."""
    if sparse.issparse(X):
        out = X.tocsr()
    else:
        out = sparse.csr_matrix(np.asarray(X, dtype=np.float64))
    if out.ndim != 2:
        raise DimensionMismatch("expected a 2-d matrix")
    return out.astype(np.float64)


def check_X_y(X, y) -> tuple[sparse.csr_matrix, np.ndarray]:
    X = as_csr(X)
    y = np.asarray(y, dtype=np.int64).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if X.shape[0] == 0:
        raise DegenerateData("empty training set")
    return X, y


def check_dimension(X, n_features: int) -> sparse.csr_matrix:
    X = as_csr(X)
    if X.shape[1] != n_features:
        raise DimensionMismatch(f"expected {n_features} features, got {X.shape[1]}")
    return X


def check_fitted(estimator, attr: str) -> None:
    if getattr(estimator, attr, None) is None:
        raise RuntimeError(f"{type(estimator).__name__} is not fitted")
