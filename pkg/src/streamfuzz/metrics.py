"""Evaluation: mean absolute error on class codes, cluster-to-class mapping, valid-cluster counts."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyInputError, MappingGapError, ShapeError

NA = float("nan")


@dataclass(frozen=True)
class LabeledPrediction:
    f: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=np.int64).ravel()
        y = np.asarray(self.y, dtype=np.int64).ravel()
        if f.shape != y.shape:
            raise ShapeError(f"shape error: {f.shape[0]} predictions vs {y.shape[0]} labels")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "y", y)


REPORT_COLUMNS = ("chunk_index", "algo", "chunk_size", "k", "valid_clusters", "mae", "error_rate",
                  "iterations", "elapsed_seconds", "objective")


@dataclass
class ChunkReport:
    chunk_index: int
    algo: str
    chunk_size: int
    k: int
    valid_clusters: int
    mae: float
    error_rate: float
    iterations: int
    elapsed_seconds: float
    objective: float

    def __post_init__(self):
        if self.valid_clusters > self.k:
            raise ValueError("valid_clusters cannot exceed k")
        if self.elapsed_seconds < 0 or (not math.isnan(self.mae) and self.mae < 0):
            raise ValueError("mae and elapsed_seconds must be nonnegative")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}


def mae(p: LabeledPrediction) -> float:
    """``(1/n) * sum |f_i - y_i|``."""
    if p.f.shape[0] == 0:
        raise EmptyInputError("empty input")
    return float(np.abs(p.f - p.y).sum() / p.f.shape[0])


def error_rate(p: LabeledPrediction) -> float:
    if p.f.shape[0] == 0:
        raise EmptyInputError("empty input")
    return float(np.count_nonzero(p.f != p.y) / p.f.shape[0])


def crisp_assignment(u) -> np.ndarray:
    # np.argmax returns the first maximum: ties go to the lowest cluster index
    return np.argmax(np.asarray(u, dtype=float), axis=0)


def assign_predictions(u, cluster_to_class: Mapping[int, int], point_labels) -> LabeledPrediction:
    labels = crisp_assignment(u)
    missing = sorted(set(range(np.asarray(u).shape[0])) - set(cluster_to_class))
    if missing:
        raise MappingGapError(f"mapping gap: clusters {missing} have no class")
    f = np.array([cluster_to_class[int(i)] for i in labels], dtype=np.int64)
    return LabeledPrediction(f, point_labels)


def _majority(codes: np.ndarray) -> int:
    values, counts = np.unique(codes, return_counts=True)
    # np.unique sorts values, so argmax picks the lowest code among ties
    return int(values[np.argmax(counts)])


def majority_mapping(u, true_labels) -> dict[int, int]:
    """Map each cluster to the most common true class among its crisply assigned points."""
    U = np.asarray(u, dtype=float)
    y = np.asarray(true_labels, dtype=np.int64).ravel()
    if U.shape[1] != y.shape[0]:
        raise ShapeError("memberships and labels differ in point count")
    if y.shape[0] == 0:
        return {i: 0 for i in range(U.shape[0])}
    fallback = _majority(y)
    labels = crisp_assignment(U)
    mapping = {}
    for i in range(U.shape[0]):
        members = y[labels == i]
        mapping[i] = _majority(members) if members.size else fallback
    return mapping


def cluster_support(u, weights=None) -> np.ndarray:
    """Weighted count of points crisply assigned to each cluster."""
    U = np.asarray(u, dtype=float)
    w = np.ones(U.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    return np.bincount(crisp_assignment(U), weights=w, minlength=U.shape[0])


def count_valid_clusters(result, weights=None, min_support: float = 1) -> int:
    """Clusters whose crisply assigned (weighted) point count reaches ``min_support``.

    ``result`` is an :class:`~streamfuzz.fcm.FcmResult` or a ``(c, n)``
    membership matrix. Zero weights exclude points from the count, which is
    how carried pseudo-points are left out of per-chunk figures.
    """
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    U = getattr(result, "memberships", result)
    return int(np.count_nonzero(cluster_support(U, weights) >= min_support))


def default_min_support(n: int) -> int:
    return max(2, math.ceil(0.005 * n))


def chunk_report(chunk, result, algo: str, *, min_support=None, valid_by: str = "support",
                 iterations=None, elapsed=None) -> ChunkReport:
    """Summarise one processed chunk.

    Only the chunk's own points count towards valid clusters and MAE; the
    carried pseudo-points that follow them in the working set are ignored.
    Labels below zero mark unknown classes and are excluded from MAE.
    ``valid_by`` is ``"support"`` (crisp point count reaching ``min_support``)
    or ``"validity"`` (the per-cluster Xie-Beni ratio test).
    """
    n = chunk.n
    U = result.memberships
    k = U.shape[0]
    Uc = U[:, :n]
    if valid_by == "validity":
        from .validity import cluster_validity_flags

        valid = int(np.count_nonzero(cluster_validity_flags(chunk.points, Uc, result.centroids)))
    elif valid_by == "support":
        support = default_min_support(n) if min_support is None else min_support
        valid = count_valid_clusters(Uc, None, support)
    else:
        raise ValueError(f"unknown valid_by {valid_by!r}")
    err = err_rate = NA
    if chunk.labels is not None:
        known = chunk.labels >= 0
        if np.any(known):
            mapping = majority_mapping(Uc[:, known], chunk.labels[known])
            pred = assign_predictions(Uc[:, known], mapping, chunk.labels[known])
            err, err_rate = mae(pred), error_rate(pred)
    return ChunkReport(
        chunk_index=chunk.index,
        algo=algo,
        chunk_size=n,
        k=k,
        valid_clusters=valid,
        mae=err,
        error_rate=err_rate,
        iterations=result.iterations if iterations is None else iterations,
        elapsed_seconds=result.elapsed if elapsed is None else elapsed,
        objective=result.objective,
    )
