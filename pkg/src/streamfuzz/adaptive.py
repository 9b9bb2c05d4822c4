"""WFCM-AC: z-scored chunks and a per-chunk k-1 / k / k+1 structure search.

Each chunk is first clustered with the current ``k`` (the *keep* refit).
From that partition two families of alternative seeds are derived:

* split: for every cluster, the crisply assigned point farthest from its
  center joins the existing centers (``k + 1`` seeds);
* merge: every center in turn is dropped (``k - 1`` seeds).

Every seed set is refit with weighted FCM on the same working set and the
structure with the lowest validity score wins.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np
from sklearn.utils.validation import check_is_fitted

from ._parallel import map_ordered
from ._validation import check_centroids, check_data, check_memberships
from .exceptions import ConfigError, NoStatisticsError, StreamFuzzError, TooFewPointsError
from .fcm import DEFAULT_EPSILON, DEFAULT_M, DEFAULT_MAX_ITER, FcmConfig, FcmResult, init_centroids, \
    run_weighted_fcm, squared_distances, update_memberships
from .metrics import chunk_report
from .stream import WFCM, Chunk, StreamState, TimeWeightPolicy, _chunk_seed, assemble_working_set, \
    center_weights, DEFAULT_DECAY
from .validity import get_validity_index

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-12


@dataclass(frozen=True)
class RunningStats:
    """Per-feature count, mean and sum of squared deviations over every point seen."""

    count: int = 0
    mean: np.ndarray | None = None
    m2: np.ndarray | None = None

    @property
    def var(self) -> np.ndarray:
        if self.count == 0:
            raise NoStatisticsError("no statistics")
        return self.m2 / self.count

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.var)


def update_stats(stats: RunningStats, chunk) -> RunningStats:
    """Merge a chunk's moments into the running ones (pairwise update of Chan et al.)."""
    X = chunk.points if isinstance(chunk, Chunk) else np.asarray(chunk, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    nb = X.shape[0]
    if nb == 0:
        return stats
    mean_b = X.mean(axis=0)
    m2_b = ((X - mean_b) ** 2).sum(axis=0)
    if stats.count == 0:
        return RunningStats(nb, mean_b, m2_b)
    if stats.mean.shape[0] != X.shape[1]:
        raise StreamFuzzError("feature dimension changed between chunks")
    na = stats.count
    n = na + nb
    delta = mean_b - stats.mean
    mean = stats.mean + delta * (nb / n)
    m2 = stats.m2 + m2_b + delta ** 2 * (na * nb / n)
    return RunningStats(n, mean, m2)


def normalize(chunk, stats: RunningStats):
    """z-score with the given statistics; features with (near) zero spread map to 0.

    Accepts a :class:`Chunk` (returns a new chunk) or a bare array.
    """
    if stats.count == 0:
        raise NoStatisticsError("no statistics")
    X = chunk.points if isinstance(chunk, Chunk) else check_data(chunk)
    std = stats.std
    flat = std < STD_FLOOR
    Z = (X - stats.mean) / np.where(flat, 1.0, std)
    Z[:, flat] = 0.0
    if isinstance(chunk, Chunk):
        return Chunk(chunk.index, Z, chunk.labels)
    return Z


def denormalize(Z, stats: RunningStats) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    std = stats.std
    return Z * np.where(std < STD_FLOOR, 0.0, std) + stats.mean


def propose_split(data, u, v) -> list[tuple[int, np.ndarray]]:
    """Split seeds, one per cluster with at least one crisply assigned point.

    Returns ``(cluster, seeds)`` pairs where ``seeds`` is ``v`` with that
    cluster's farthest member appended. Ties go to the lowest point index.
    """
    X = check_data(data)
    V = check_centroids(v, X.shape[1])
    U = check_memberships(u, V.shape[0], X.shape[0])
    k = V.shape[0]
    if k + 1 > X.shape[0]:
        raise TooFewPointsError(f"too few points to split: {X.shape[0]} points for {k + 1} clusters")
    labels = np.argmax(U, axis=0)
    D2 = squared_distances(X, V)
    out = []
    for t in range(k):
        members = np.flatnonzero(labels == t)
        if members.size == 0:
            continue
        far = members[int(np.argmax(D2[t, members]))]
        out.append((t, np.vstack([V, X[far]])))
    return out


def propose_merge(v, k_min: int = 2) -> list[tuple[int, np.ndarray]]:
    """Seeds with one center removed; empty when that would drop below ``k_min``."""
    V = check_centroids(v)
    k = V.shape[0]
    if k <= k_min:
        return []
    return [(i, np.delete(V, i, axis=0)) for i in range(k)]


def validity_index(data, u, v, weights=None, name: str = "xie-beni") -> float:
    return get_validity_index(name)(data, u, v, weights)


@dataclass(frozen=True)
class AcConfig:
    base: FcmConfig
    k_min: int = 2
    k_max: int | None = None
    validity: str = "xie-beni"

    def __post_init__(self):
        if self.k_max is None:
            object.__setattr__(self, "k_max", 2 * self.base.c)
        if self.k_min < 2:
            raise ConfigError("k_min must be >= 2")
        if not self.k_min <= self.base.c <= self.k_max:
            raise ConfigError(f"need k_min <= k <= k_max, got {self.k_min}, {self.base.c}, {self.k_max}")
        get_validity_index(self.validity)


KIND_ORDER = {"keep": 0, "merge": 1, "split": 2}


@dataclass
class CandidateStructure:
    kind: str
    index: int | None
    init: np.ndarray
    result: FcmResult | None
    validity: float
    reason: str | None = None

    @property
    def k(self) -> int:
        return self.init.shape[0]

    @property
    def rank(self) -> tuple:
        return (self.validity, KIND_ORDER[self.kind], -1 if self.index is None else self.index)


def _duplicates_a_center(seeds: np.ndarray) -> bool:
    return bool(np.any(np.all(seeds[:-1] == seeds[-1], axis=1)))


def _refit(X, w, config: AcConfig, kind, index, seeds) -> CandidateStructure | None:
    if kind == "split" and _duplicates_a_center(seeds):
        return CandidateStructure(kind, index, seeds, None, float("inf"), "new center duplicates an existing one")
    try:
        result = run_weighted_fcm(X, w, config.base.with_c(seeds.shape[0]), seeds)
        score = validity_index(X, result.memberships, result.centroids, w, config.validity)
    except StreamFuzzError as exc:
        logger.info("skipping %s candidate %s: %s", kind, index, exc)
        return None
    return CandidateStructure(kind, index, seeds, result, score)


def search_structures(X, w, keep: CandidateStructure, config: AcConfig) -> list[CandidateStructure]:
    """Evaluate every merge and split alternative to ``keep``. Order: keep, merges, splits."""
    k = keep.k
    V, U = keep.result.centroids, keep.result.memberships
    jobs = [("merge", i, s) for i, s in propose_merge(V, config.k_min)]
    if k + 1 <= config.k_max:
        try:
            jobs += [("split", t, s) for t, s in propose_split(X, U, V)]
        except TooFewPointsError as exc:
            logger.info("no split candidates: %s", exc)
    refits = map_ordered(lambda job: _refit(X, w, config, *job), jobs)
    return [keep] + [c for c in refits if c is not None]


def select_structure(candidates: list[CandidateStructure]) -> CandidateStructure:
    """Lowest validity; ties prefer keep, then merge, then split, then the lowest index."""
    return min(candidates, key=lambda c: c.rank)


def adapt_cluster_count(state: StreamState, chunk: Chunk, config: AcConfig,
                        policy: TimeWeightPolicy = TimeWeightPolicy(), *, min_support=None,
                        valid_by: str = "support"):
    """One WFCM-AC step on an already normalized chunk.

    Returns ``(new_state, winner, report)``. The report's iteration count and
    elapsed time cover every refit evaluated for the chunk.
    """
    start = time.perf_counter()
    X, w = assemble_working_set(chunk, state, policy)
    k = state.k if state.k else config.base.c
    if state.k == k:
        init = state.centers
    else:
        init = init_centroids(X, k, _chunk_seed(config.base, chunk))
    keep_result = run_weighted_fcm(X, w, config.base.with_c(k), init)
    if k >= 2:
        keep_score = validity_index(X, keep_result.memberships, keep_result.centroids, w, config.validity)
    else:
        keep_score = float("inf")
    keep = CandidateStructure("keep", None, init, keep_result, keep_score)
    candidates = search_structures(X, w, keep, config)
    winner = select_structure(candidates)
    result = winner.result
    new_state = StreamState.from_arrays(result.centroids, center_weights(result.memberships, w),
                                        state.chunk_count + 1)
    iterations = sum(c.result.iterations for c in candidates if c.result is not None)
    report = chunk_report(chunk, result, "wfcm-ac", min_support=min_support, valid_by=valid_by,
                          iterations=iterations,
                          elapsed=time.perf_counter() - start)
    logger.debug("chunk %d: %d candidates, winner %s(%s) k=%d", chunk.index, len(candidates),
                 winner.kind, winner.index, winner.k)
    return new_state, winner, report


def rescale_centers(centers, old: RunningStats, new: RunningStats) -> np.ndarray:
    """Re-express centers z-scored under ``old`` statistics in ``new`` coordinates."""
    return normalize(denormalize(centers, old), new)


class WFCMAC(WFCM):
    """Streaming WFCM with z-scored input and an adaptive cluster count.

    ``norm='cumulative'`` scales every chunk by the statistics of all data
    seen so far; ``'per-chunk'`` uses the chunk's own statistics. Carried
    centers are re-expressed whenever the scaling changes. ``n_clusters`` is
    the starting ``k``; the current one is ``n_clusters_``.
    """

    _algo = "wfcm-ac"

    def __init__(self, n_clusters=5, m=DEFAULT_M, epsilon=DEFAULT_EPSILON, max_iter=DEFAULT_MAX_ITER,
                 decay=DEFAULT_DECAY, chunk_size=None, min_support=None, valid_by="support", random_state=0,
                 k_min=2, k_max=None, validity="xie-beni", norm="cumulative"):
        super().__init__(n_clusters=n_clusters, m=m, epsilon=epsilon, max_iter=max_iter, decay=decay,
                         chunk_size=chunk_size, min_support=min_support, valid_by=valid_by,
                         random_state=random_state)
        self.k_min = k_min
        self.k_max = k_max
        self.validity = validity
        self.norm = norm

    def _ac_config(self) -> AcConfig:
        return AcConfig(self._fcm_config(), self.k_min, self.k_max, self.validity)

    def _reset(self):
        super()._reset()
        self.stats_ = RunningStats()
        self.scaling_ = None

    def _step(self, chunk: Chunk):
        stats = self.stats_
        if self.norm == "cumulative":
            stats = update_stats(stats, chunk)
            scaling = stats
        elif self.norm == "per-chunk":
            scaling = update_stats(RunningStats(), chunk)
        else:
            raise ConfigError(f"unknown normalization mode {self.norm!r}")
        state = self.state_
        if state.carried and self.scaling_ is not None:
            state = StreamState.from_arrays(rescale_centers(state.centers, self.scaling_, scaling),
                                            state.weights, state.chunk_count)
        self.state_, winner, report = adapt_cluster_count(
            state, normalize(chunk, scaling), self._ac_config(), TimeWeightPolicy(self.decay),
            min_support=self.min_support, valid_by=self.valid_by,
        )
        self.stats_ = stats
        self.scaling_ = scaling
        self.last_candidate_ = winner
        self._record(chunk, winner.result, report)

    def predict_proba(self, X):
        check_is_fitted(self, "cluster_centers_")
        return update_memberships(normalize(check_data(X), self.scaling_), self.cluster_centers_, self.m).T
