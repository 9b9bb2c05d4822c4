"""Chunked WFCM: cluster each chunk together with the weighted centers left by the previous one."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_data
from .exceptions import ConfigError, SchemaDriftError, StreamFuzzError
from .fcm import (
    DEFAULT_EPSILON,
    DEFAULT_M,
    DEFAULT_MAX_ITER,
    FcmConfig,
    FcmResult,
    init_centroids,
    run_weighted_fcm,
    update_memberships,
)
from .metrics import ChunkReport, chunk_report

DEFAULT_DECAY = 0.1


@dataclass
class Chunk:
    index: int
    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        self.points = check_data(self.points, "chunk")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape[0] != self.points.shape[0]:
                raise StreamFuzzError("chunk labels and points differ in length")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def arrival(self) -> int:
        return self.index


@dataclass(frozen=True)
class TimeWeightPolicy:
    decay: float = DEFAULT_DECAY

    def __post_init__(self):
        if not (self.decay >= 0 and math.isfinite(self.decay)):
            raise ConfigError(f"decay rate must be finite and >= 0, got {self.decay}")


@dataclass(frozen=True)
class WeightedCenter:
    vector: np.ndarray
    weight: float


@dataclass
class StreamState:
    carried: list[WeightedCenter] = field(default_factory=list)
    chunk_count: int = 0

    @property
    def k(self) -> int:
        return len(self.carried)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.vector for c in self.carried])

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.carried], dtype=float)

    @classmethod
    def from_arrays(cls, centers, weights, chunk_count: int) -> "StreamState":
        carried = [WeightedCenter(np.array(v, dtype=float), float(w)) for v, w in zip(centers, weights)]
        return cls(carried, chunk_count)


def time_weight(age: float, policy: TimeWeightPolicy = TimeWeightPolicy()) -> float:
    """Influence of data that is ``age`` chunks old: ``exp(-decay * age)``."""
    if age < 0:
        raise StreamFuzzError(f"age must be >= 0, got {age}")
    return math.exp(-policy.decay * age)


def assemble_working_set(chunk: Chunk, state: StreamState, policy: TimeWeightPolicy = TimeWeightPolicy()):
    """New points at weight 1, then carried centers as pseudo-points aged by one chunk."""
    if chunk.index != state.chunk_count + 1:
        raise StreamFuzzError(f"expected chunk {state.chunk_count + 1}, got {chunk.index}")
    X = chunk.points
    w = np.ones(chunk.n)
    if state.carried:
        C = state.centers
        if C.shape[1] != X.shape[1]:
            raise SchemaDriftError(f"schema drift: chunk has {X.shape[1]} features, carried centers {C.shape[1]}")
        X = np.vstack([X, C])
        w = np.concatenate([w, state.weights * time_weight(1, policy)])
    return X, w


def center_weights(u, weights) -> np.ndarray:
    """``w_i = sum_j u_ij * w_j``."""
    U = np.asarray(u, dtype=float)
    w = np.asarray(weights, dtype=float)
    if U.ndim != 2 or U.shape[1] != w.shape[0]:
        raise StreamFuzzError("memberships and weights disagree in point count")
    return U @ w


def _chunk_seed(config: FcmConfig, chunk: Chunk) -> int:
    return config.seed + chunk.index - 1


def process_chunk(state: StreamState, chunk: Chunk, config: FcmConfig,
                  policy: TimeWeightPolicy = TimeWeightPolicy(), *, min_support: int | None = None,
                  valid_by: str = "support"):
    """One WFCM step. Returns ``(new_state, result, report)``; ``state`` is left untouched."""
    X, w = assemble_working_set(chunk, state, policy)
    if state.k == config.c:
        init = state.centers
    else:
        init = init_centroids(X, config.c, _chunk_seed(config, chunk))
    result = run_weighted_fcm(X, w, config, init)
    new_state = StreamState.from_arrays(result.centroids, center_weights(result.memberships, w),
                                        state.chunk_count + 1)
    report = chunk_report(chunk, result, "wfcm", min_support=min_support, valid_by=valid_by)
    return new_state, result, report


class WFCM(ClusterMixin, BaseEstimator):
    """Streaming weighted fuzzy c-means.

    Each call to :meth:`partial_fit` consumes one chunk; only the weighted
    centers survive between calls. :meth:`fit` resets the stream and feeds
    ``X`` in consecutive chunks of ``chunk_size`` rows (all of ``X`` at once
    when ``chunk_size`` is None). ``y``, when given, holds integer class codes
    used only for the per-chunk reports.
    """

    _algo = "wfcm"

    def __init__(self, n_clusters=5, m=DEFAULT_M, epsilon=DEFAULT_EPSILON, max_iter=DEFAULT_MAX_ITER,
                 decay=DEFAULT_DECAY, chunk_size=None, min_support=None, valid_by="support", random_state=0):
        self.n_clusters = n_clusters
        self.m = m
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.decay = decay
        self.chunk_size = chunk_size
        self.min_support = min_support
        self.valid_by = valid_by
        self.random_state = random_state

    def _fcm_config(self) -> FcmConfig:
        seed = 0 if self.random_state is None else int(self.random_state)
        return FcmConfig(self.n_clusters, self.m, self.epsilon, self.max_iter, seed)

    def _reset(self):
        self.state_ = StreamState()
        self.reports_ = []

    def fit(self, X, y=None):
        self._reset()
        X = check_data(X)
        size = X.shape[0] if self.chunk_size is None else int(self.chunk_size)
        if size < 1:
            raise ConfigError("chunk_size must be >= 1")
        for lo in range(0, X.shape[0], size):
            self.partial_fit(X[lo:lo + size], None if y is None else np.asarray(y)[lo:lo + size])
        return self

    def partial_fit(self, X, y=None):
        if not hasattr(self, "state_"):
            self._reset()
        chunk = Chunk(self.state_.chunk_count + 1, X, y)
        self._step(chunk)
        return self

    def _step(self, chunk: Chunk):
        self.state_, result, report = process_chunk(
            self.state_, chunk, self._fcm_config(), TimeWeightPolicy(self.decay),
            min_support=self.min_support, valid_by=self.valid_by,
        )
        self._record(chunk, result, report)

    def _record(self, chunk: Chunk, result: FcmResult, report: ChunkReport):
        self.last_result_ = result
        self.reports_.append(report)
        self.cluster_centers_ = self.state_.centers
        self.center_weights_ = self.state_.weights
        self.n_clusters_ = self.state_.k
        self.labels_ = np.argmax(result.memberships[:, :chunk.n], axis=0)
        self.n_features_in_ = chunk.points.shape[1]

    def predict_proba(self, X):
        check_is_fitted(self, "cluster_centers_")
        return update_memberships(X, self.cluster_centers_, self.m).T

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)
