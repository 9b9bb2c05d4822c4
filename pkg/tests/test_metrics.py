import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_mae
from streamfuzz.exceptions import EmptyInputError, MappingGapError, ShapeError
from streamfuzz.fcm import FcmResult, update_memberships
from streamfuzz.metrics import (
    ChunkReport,
    LabeledPrediction,
    assign_predictions,
    chunk_report,
    count_valid_clusters,
    majority_mapping,
    mae,
)
from streamfuzz.stream import Chunk
from streamfuzz.validity import cluster_validity_flags

DOS, NORMAL = 1, 0


def test_mae_zero_when_equal():
    assert mae(LabeledPrediction([1, 2, 3], [1, 2, 3])) == 0


def test_mae_hand_value():
    assert mae(LabeledPrediction([1, 2, 3], [2, 2, 5])) == 1.0


def test_mae_single():
    assert mae(LabeledPrediction([0], [4])) == 4.0


def test_mae_errors():
    with pytest.raises(ShapeError, match="shape error"):
        LabeledPrediction([1, 2], [1])
    with pytest.raises(EmptyInputError, match="empty input"):
        mae(LabeledPrediction([], []))


codes = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=200)


@settings(max_examples=100, deadline=None)
@given(pairs=codes, seed=st.integers(0, 1000))
def test_mae_properties(pairs, seed):
    f, y = map(list, zip(*pairs))
    p = LabeledPrediction(f, y)
    assert mae(p) == brute_mae(f, y)
    assert (mae(p) == 0) == (f == y)
    perm = np.random.default_rng(seed).permutation(len(f))
    assert mae(LabeledPrediction(np.array(f)[perm], np.array(y)[perm])) == pytest.approx(mae(p), abs=1e-12)
    # one prediction moved by delta changes MAE by at most |delta| / n
    g = list(f)
    g[0] += 3
    assert abs(mae(LabeledPrediction(g, y)) - mae(p)) <= 3 / len(f) + 1e-12


def test_assign_identity_mapping():
    U = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1]], float)
    p = assign_predictions(U, {0: 0, 1: 1, 2: 2}, [0, 1, 2])
    assert p.f.tolist() == [0, 1, 2]


def test_assign_tie_goes_to_cluster_zero():
    p = assign_predictions(np.array([[0.5], [0.5]]), {0: 3, 1: 4}, [0])
    assert p.f.tolist() == [3]


def test_assign_from_hand_memberships():
    U = update_memberships([[2.0]], [[0.0], [10.0]], 2.0)
    assert assign_predictions(U, {0: DOS, 1: NORMAL}, [DOS]).f.tolist() == [DOS]


def test_assign_mapping_gap():
    with pytest.raises(MappingGapError, match="mapping gap"):
        assign_predictions(np.eye(2), {0: 0}, [0, 0])


def test_majority_mapping_rules():
    U = np.array([[1, 1, 1, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 1, 1, 1, 1]], float)
    y = [1, 1, 2, 1, 2, 0, 0]
    # cluster 2 has labels (1, 2, 0, 0): class 0 has the majority
    assert majority_mapping(U, y) == {0: 1, 1: 1, 2: 0}


def test_majority_tie_lowest_code():
    assert majority_mapping(np.ones((1, 2)), [2, 1]) == {0: 1}


def test_majority_empty_cluster_uses_global():
    U = np.array([[1, 1, 1], [0, 0, 0]], float)
    assert majority_mapping(U, [0, 0, 3])[1] == 0


def test_pure_clusters_give_zero_mae():
    U = np.array([[1, 0, 1, 0], [0, 1, 0, 1]], float)
    y = [3, 1, 3, 1]
    assert mae(assign_predictions(U, majority_mapping(U, y), y)) == 0


def _crisp(counts):
    labels = np.repeat(np.arange(len(counts)), counts)
    U = np.zeros((len(counts), labels.size))
    U[labels, np.arange(labels.size)] = 1
    return U


def test_valid_clusters_all_nonempty():
    assert count_valid_clusters(_crisp([3, 4, 1]), min_support=1) == 3


def test_valid_clusters_one_empty():
    assert count_valid_clusters(_crisp([3, 0, 2, 5]), min_support=1) == 3


def test_valid_clusters_threshold():
    assert count_valid_clusters(_crisp([10, 2, 0]), min_support=3) == 1


def test_valid_clusters_on_result_and_weights():
    U = _crisp([2, 2])
    res = FcmResult(np.zeros((2, 1)), U)
    assert count_valid_clusters(res, [1, 1, 0, 0], min_support=1) == 1


@settings(max_examples=50, deadline=None)
@given(counts=st.lists(st.integers(0, 30), min_size=1, max_size=8))
def test_valid_clusters_monotone(counts):
    U = _crisp(counts) if sum(counts) else np.zeros((len(counts), 0))
    vals = [count_valid_clusters(U, min_support=s) for s in range(1, 35)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[0] <= len(counts)


def test_chunk_report_ignores_carried_points_and_unknown_labels():
    X = np.array([[0.0], [0.1], [5.0], [5.1]])
    U = np.array([[1, 1, 0, 0, 1], [0, 0, 1, 1, 0]], float)
    res = FcmResult(np.array([[0.05], [5.05]]), U, [1.0], 3, 0.01)
    r = chunk_report(Chunk(1, X, [0, 0, 2, -1]), res, "wfcm", min_support=2)
    assert (r.k, r.valid_clusters, r.mae, r.error_rate, r.iterations) == (2, 2, 0.0, 0.0, 3)
    assert r.objective == 1.0


def test_chunk_report_validity_rule():
    X = np.array([[0.0], [0.1], [5.0], [5.1]])
    V = np.array([[0.05], [5.05]])
    U = update_memberships(X, V)
    flags = cluster_validity_flags(X, U, V)
    assert flags.tolist() == [True, True]
    r = chunk_report(Chunk(1, X), FcmResult(V, U, [0.0]), "wfcm", valid_by="validity")
    assert r.valid_clusters == 2


def test_validity_flags_reject_overlapping_clusters():
    X = np.array([[0.0], [4.0], [0.2], [3.8]])
    V = np.array([[1.9], [2.1]])
    assert not cluster_validity_flags(X, update_memberships(X, V), V).any()


def test_chunk_report_invariants():
    with pytest.raises(ValueError):
        ChunkReport(1, "wfcm", 10, 2, 3, 0.0, 0.0, 1, 0.0, 0.0)
    with pytest.raises(ValueError):
        ChunkReport(1, "wfcm", 10, 2, 2, -1.0, 0.0, 1, 0.0, 0.0)
