"""Weighted fuzzy c-means.

Conventions used throughout the package:

* data ``X`` is ``(n, d)``, one point per row;
* centroids ``V`` are ``(c, d)``;
* memberships ``U`` are ``(c, n)`` so that ``U[i, j]`` is the degree to which
  point ``j`` belongs to cluster ``i`` and every column sums to one;
* point weights ``w`` are ``(n,)`` and nonnegative.

The sklearn-facing :class:`WeightedFuzzyCMeans` transposes memberships to the
usual ``(n_samples, n_clusters)`` layout.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_centroids, check_data, check_memberships, check_weights
from .exceptions import (
    ConfigError,
    DegenerateClusterError,
    InsufficientPointsError,
    InvalidClusterCountError,
)

DEFAULT_M = 2.0
DEFAULT_EPSILON = 1e-5
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class FcmConfig:
    c: int
    m: float = DEFAULT_M
    epsilon: float = DEFAULT_EPSILON
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0

    def __post_init__(self):
        if int(self.c) < 1:
            raise InvalidClusterCountError(f"invalid cluster count: {self.c}")
        if not self.m > 1:
            raise ConfigError(f"fuzzifier m must be > 1, got {self.m}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if int(self.max_iter) < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")

    def with_c(self, c: int) -> "FcmConfig":
        return FcmConfig(c=c, m=self.m, epsilon=self.epsilon, max_iter=self.max_iter, seed=self.seed)


@dataclass
class FcmResult:
    centroids: np.ndarray
    memberships: np.ndarray
    objective_history: list[float] = field(default_factory=list)
    iterations: int = 0
    elapsed: float = 0.0

    @property
    def objective(self) -> float:
        return self.objective_history[-1] if self.objective_history else float("nan")


def squared_distances(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    """``(c, n)`` matrix of squared Euclidean distances from each center to each point."""
    diff = V[:, None, :] - X[None, :, :]
    return np.einsum("cnd,cnd->cn", diff, diff)


def init_centroids(data, c: int, seed: int = 0) -> np.ndarray:
    """Pick ``c`` rows of ``data`` by seeded sampling without replacement.

    Rows with distinct values are preferred so that streams with long runs of
    identical records do not start from coincident centers; duplicates are
    only used once every distinct row has been taken.
    """
    X = check_data(data)
    n = X.shape[0]
    if c < 1:
        raise InvalidClusterCountError(f"invalid cluster count: {c}")
    if c > n:
        raise InsufficientPointsError(f"insufficient points: need {c}, have {n}")
    rng = np.random.default_rng(seed)
    _, first = np.unique(X, axis=0, return_index=True)
    first = np.sort(first)
    if first.shape[0] >= c:
        idx = rng.choice(first, size=c, replace=False)
    else:
        rest = np.setdiff1d(np.arange(n), first)
        idx = np.concatenate([rng.permutation(first), rng.choice(rest, size=c - first.shape[0], replace=False)])
    return X[idx].copy()


def memberships_from_sq_distances(D2: np.ndarray, m: float) -> np.ndarray:
    """Membership rule on a precomputed ``(c, n)`` squared-distance matrix."""
    c, n = D2.shape
    U = np.empty((c, n))
    zero = D2 <= 0.0
    hit = zero.any(axis=0)
    if np.any(hit):
        Z = zero[:, hit].astype(float)
        U[:, hit] = Z / Z.sum(axis=0)
    free = ~hit
    if np.any(free):
        Df = D2[:, free]
        # ratio to the nearest center keeps every term in (0, 1]; no overflow for tiny distances
        ratio = (Df.min(axis=0) / Df) ** (1.0 / (m - 1.0))
        U[:, free] = ratio / ratio.sum(axis=0)
    return U


def update_memberships(data, v, m: float = DEFAULT_M) -> np.ndarray:
    X = check_data(data)
    V = check_centroids(v, X.shape[1])
    if not m > 1:
        raise ConfigError(f"fuzzifier m must be > 1, got {m}")
    return memberships_from_sq_distances(squared_distances(X, V), m)


def update_centroids(data, u, weights=None, m: float = DEFAULT_M) -> np.ndarray:
    """Weighted centroid update; raises :class:`DegenerateClusterError` on empty clusters."""
    X = check_data(data)
    n = X.shape[0]
    U = check_memberships(u, n=n)
    w = check_weights(weights, n)
    Wm = (U ** m) * w
    den = Wm.sum(axis=1)
    bad = np.flatnonzero(~(den > 0))
    if bad.size:
        raise DegenerateClusterError(bad)
    return (Wm @ X) / den[:, None]


def objective(data, u, v, weights=None, m: float = DEFAULT_M) -> float:
    X = check_data(data)
    V = check_centroids(v, X.shape[1])
    U = check_memberships(u, V.shape[0], X.shape[0])
    w = check_weights(weights, X.shape[0])
    return float(np.sum((U ** m) * w * squared_distances(X, V)))


def _reseed(X, w, V, clusters, tried):
    """Move each degenerate center onto the point worst served by the current centers."""
    V = V.copy()
    for i in clusters:
        if i in tried:
            raise DegenerateClusterError([i], f"degenerate cluster {i} persisted after re-seeding")
        tried.add(i)
        cost = w * squared_distances(X, V).min(axis=0)
        V[i] = X[int(np.argmax(cost))]
    return V


def run_weighted_fcm(data, weights, config: FcmConfig, init=None) -> FcmResult:
    """Alternate membership and centroid updates from ``init`` until the objective settles.

    Without ``init`` the start is ``init_centroids(data, config.c, config.seed)``.

    Stops once successive objective values differ by less than
    ``config.epsilon`` or after ``config.max_iter`` update pairs. The returned
    memberships are recomputed from the final centroids.
    """
    X = check_data(data)
    n, d = X.shape
    w = check_weights(weights, n)
    if config.c > n:
        raise InsufficientPointsError(f"insufficient points: need {config.c}, have {n}")
    V = check_centroids(init_centroids(X, config.c, config.seed) if init is None else init, d)
    if V.shape[0] != config.c:
        raise InvalidClusterCountError(f"init has {V.shape[0]} centers, config expects {config.c}")
    m = float(config.m)

    start = time.perf_counter()
    history: list[float] = []
    tried: set[int] = set()
    t = 0
    while t < config.max_iter:
        D2 = squared_distances(X, V)
        U = memberships_from_sq_distances(D2, m)
        Wm = (U ** m) * w
        den = Wm.sum(axis=1)
        bad = np.flatnonzero(~(den > 0))
        if bad.size:
            V = _reseed(X, w, V, bad, tried)
            continue
        V = (Wm @ X) / den[:, None]
        t += 1
        J = float(np.sum(Wm * squared_distances(X, V)))
        history.append(J)
        if len(history) > 1 and abs(history[-2] - J) < config.epsilon:
            break
    U = memberships_from_sq_distances(squared_distances(X, V), m)
    return FcmResult(V, U, history, t, time.perf_counter() - start)


class WeightedFuzzyCMeans(ClusterMixin, TransformerMixin, BaseEstimator):
    """Batch fuzzy c-means with optional per-sample weights.

    Parameters
    ----------
    n_clusters : int
    m : float
        Fuzzifier, must exceed 1.
    epsilon : float
        Stop when the objective changes by less than this between iterations.
    max_iter : int
    init : 'random' or array of shape (n_clusters, n_features)
    random_state : int
        Seed for ``init='random'``.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    membership_ : ndarray of shape (n_samples, n_clusters)
    objective_history_ : list of float
    n_iter_ : int
    """

    def __init__(self, n_clusters=2, m=DEFAULT_M, epsilon=DEFAULT_EPSILON, max_iter=DEFAULT_MAX_ITER,
                 init="random", random_state=0):
        self.n_clusters = n_clusters
        self.m = m
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.init = init
        self.random_state = random_state

    def _config(self) -> FcmConfig:
        seed = 0 if self.random_state is None else int(self.random_state)
        return FcmConfig(self.n_clusters, self.m, self.epsilon, self.max_iter, seed)

    def fit(self, X, y=None, sample_weight=None):
        X = check_data(X)
        config = self._config()
        if isinstance(self.init, str):
            if self.init != "random":
                raise ConfigError(f"unknown init {self.init!r}")
            init = init_centroids(X, config.c, config.seed)
        else:
            init = check_centroids(self.init, X.shape[1])
        result = run_weighted_fcm(X, sample_weight, config, init)
        self.cluster_centers_ = result.centroids
        self.membership_ = result.memberships.T
        self.objective_history_ = result.objective_history
        self.n_iter_ = result.iterations
        self.n_features_in_ = X.shape[1]
        self.labels_ = np.argmax(result.memberships, axis=0)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "cluster_centers_")
        return update_memberships(X, self.cluster_centers_, self.m).T

    def transform(self, X):
        return self.predict_proba(X)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)
