"""Input checks shared by the functional core and the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import ShapeError, StreamFuzzError


def check_data(X, name: str = "X") -> np.ndarray:
    """Return ``X`` as a finite float64 ``(n, d)`` array with ``n, d >= 1``.

    1-D input is read as ``n`` points of dimension 1.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    try:
        return check_array(X, dtype=np.float64, ensure_all_finite=True, input_name=name)
    except ValueError as exc:
        raise StreamFuzzError(str(exc)) from exc


def check_weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != n:
        raise ShapeError(f"weights have length {w.shape[0]}, expected {n}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise StreamFuzzError("weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise StreamFuzzError("at least one weight must be positive")
    return w


def check_centroids(V, d: int | None = None) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.ndim != 2 or V.shape[0] < 1:
        raise ShapeError("centroids must be a non-empty (c, d) array")
    if d is not None and V.shape[1] != d:
        raise ShapeError(f"centroid dimension {V.shape[1]} != data dimension {d}")
    if not np.all(np.isfinite(V)):
        raise StreamFuzzError("centroids must be finite")
    return V


def check_memberships(U, c: int | None = None, n: int | None = None) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise ShapeError("memberships must be a (c, n) array")
    if c is not None and U.shape[0] != c:
        raise ShapeError(f"memberships have {U.shape[0]} rows, expected {c}")
    if n is not None and U.shape[1] != n:
        raise ShapeError(f"memberships have {U.shape[1]} columns, expected {n}")
    return U
