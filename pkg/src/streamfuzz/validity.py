"""Fuzzy cluster validity indices. Lower is better for every index here."""

from __future__ import annotations

import numpy as np

from ._validation import check_centroids, check_data, check_memberships, check_weights
from .exceptions import ConfigError, InvalidClusterCountError
from .fcm import squared_distances


def _min_center_separation(V: np.ndarray) -> np.ndarray:
    """Per-center squared distance to the nearest other center."""
    S = squared_distances(V, V)
    np.fill_diagonal(S, np.inf)
    return S.min(axis=1)


def xie_beni(data, u, v, weights=None) -> float:
    """Weighted Xie-Beni index.

    ``sum_ij w_j u_ij^2 |x_j - v_i|^2 / (sum_j w_j * min_{i != p} |v_i - v_p|^2)``.
    Coincident centers give ``inf`` rather than an error.
    """
    X = check_data(data)
    V = check_centroids(v, X.shape[1])
    if V.shape[0] < 2:
        raise InvalidClusterCountError("validity index needs at least 2 clusters")
    U = check_memberships(u, V.shape[0], X.shape[0])
    w = check_weights(weights, X.shape[0])
    sep = float(_min_center_separation(V).min())
    if not sep > 0:
        return float("inf")
    compact = float(np.sum(w * U ** 2 * squared_distances(X, V)))
    return compact / (float(w.sum()) * sep)


def cluster_validity_flags(data, u, v, weights=None, threshold: float = 1.0) -> np.ndarray:
    """Per-cluster Xie-Beni ratio test.

    Cluster ``i`` is flagged valid when its weighted mean fuzzy spread is at
    most ``threshold`` times the squared distance to its nearest neighbour
    center. Clusters without membership mass are invalid.
    """
    X = check_data(data)
    V = check_centroids(v, X.shape[1])
    U = check_memberships(u, V.shape[0], X.shape[0])
    w = np.ones(X.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    mass = (U ** 2) @ w
    spread = np.sum(w * U ** 2 * squared_distances(X, V), axis=1)
    if V.shape[0] < 2:
        return mass > 0
    sep = _min_center_separation(V)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mass > 0, spread / np.where(mass > 0, mass, 1.0), np.inf) / sep
    return (mass > 0) & (ratio <= threshold)


VALIDITY_INDICES = {"xie-beni": xie_beni}


def get_validity_index(name: str):
    try:
        return VALIDITY_INDICES[name]
    except KeyError:
        raise ConfigError(f"unknown validity index {name!r}") from None
