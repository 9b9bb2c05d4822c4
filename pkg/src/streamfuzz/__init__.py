"""Streaming weighted fuzzy c-means (WFCM) and its adaptive-k variant (WFCM-AC)."""

from .adaptive import (
    WFCMAC,
    AcConfig,
    CandidateStructure,
    RunningStats,
    adapt_cluster_count,
    denormalize,
    normalize,
    propose_merge,
    propose_split,
    update_stats,
    validity_index,
)
from .fcm import (
    FcmConfig,
    FcmResult,
    WeightedFuzzyCMeans,
    init_centroids,
    objective,
    run_weighted_fcm,
    update_centroids,
    update_memberships,
)
from .metrics import (
    ChunkReport,
    LabeledPrediction,
    assign_predictions,
    count_valid_clusters,
    majority_mapping,
    mae,
)
from .stream import (
    WFCM,
    Chunk,
    StreamState,
    TimeWeightPolicy,
    WeightedCenter,
    assemble_working_set,
    center_weights,
    process_chunk,
    time_weight,
)
from .validity import xie_beni

__version__ = "0.1.0"

__all__ = [
    "WFCM",
    "WFCMAC",
    "AcConfig",
    "CandidateStructure",
    "Chunk",
    "ChunkReport",
    "FcmConfig",
    "FcmResult",
    "LabeledPrediction",
    "RunningStats",
    "StreamState",
    "TimeWeightPolicy",
    "WeightedCenter",
    "WeightedFuzzyCMeans",
    "adapt_cluster_count",
    "assemble_working_set",
    "assign_predictions",
    "center_weights",
    "count_valid_clusters",
    "denormalize",
    "init_centroids",
    "mae",
    "majority_mapping",
    "normalize",
    "objective",
    "process_chunk",
    "propose_merge",
    "propose_split",
    "run_weighted_fcm",
    "time_weight",
    "update_centroids",
    "update_memberships",
    "update_stats",
    "validity_index",
    "xie_beni",
]
