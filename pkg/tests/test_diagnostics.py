import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schain import cohesiveness, composite_quality, connectedness, nmi, pairwise_cohesiveness, quality_report
from schain.diagnostics import ConnectivityGraph
from schain.errors import DataError, LabelSetMismatch, SingleCluster


def _graph(n, edges, weights=None):
    W = np.zeros((n, n))
    for idx, (u, v) in enumerate(edges):
        W[u, v] = W[v, u] = 1.0 if weights is None else weights[idx]
    return W


# C1 = {0,1,2} with 2 intra edges, C2 = {3,4,5} with 3 intra edges, one inter edge
FIXTURE = _graph(6, [(0, 1), (1, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
FIXTURE_LABELS = [0, 0, 0, 1, 1, 1]


def test_hand_computed_cohesiveness():
    assert pairwise_cohesiveness(FIXTURE, FIXTURE_LABELS, 0, 1) == pytest.approx(0.25, abs=1e-12)
    per, total = cohesiveness(FIXTURE, FIXTURE_LABELS)
    np.testing.assert_allclose(per, [0.25, 0.25], atol=1e-12)
    assert total == pytest.approx(0.25, abs=1e-12)


def test_no_inter_edges_is_one():
    W = _graph(4, [(0, 1), (2, 3)])
    assert pairwise_cohesiveness(W, [0, 0, 1, 1], 0, 1) == 1.0
    assert cohesiveness(W, [0, 0, 1, 1])[1] == 1.0


def test_no_intra_edges_is_zero():
    W = _graph(4, [(0, 2), (2, 3)])
    assert pairwise_cohesiveness(W, [0, 0, 1, 1], 0, 1) == 0.0


def test_empty_pair_is_zero():
    W = _graph(4, [])
    assert pairwise_cohesiveness(W, ["x", "x", "y", "y"], 0, 1) == 0.0


def test_single_cluster_error():
    with pytest.raises(SingleCluster):
        cohesiveness(FIXTURE, [0] * 6)
    with pytest.raises(DataError):
        pairwise_cohesiveness(FIXTURE, FIXTURE_LABELS, 1, 1)


def test_connectedness_examples():
    # cluster of four objects in two components
    W = _graph(6, [(0, 1), (2, 3), (4, 5)])
    psi, ndc, _ = connectedness(W, [0, 0, 0, 0, 1, 1])
    assert list(ndc) == [2, 1]
    assert psi[0] == pytest.approx(0.5, abs=1e-12) and psi[1] == 1.0
    psi, ndc, total = connectedness(_graph(3, []), [0, 0, 0])
    assert list(ndc) == [3] and psi[0] == 0.0 and total == 0.0


def test_graph_connectedness_is_size_weighted():
    W = _graph(6, [(0, 1), (2, 3), (4, 5)])
    psi, _, total = connectedness(W, [0, 0, 0, 0, 1, 1])
    assert total == pytest.approx(4 / 6 * 0.5 + 2 / 6 * 1.0)


def test_composite_quality():
    W = FIXTURE
    single = composite_quality([W], FIXTURE_LABELS, [1.0])
    assert single == (cohesiveness(W, FIXTURE_LABELS)[1], connectedness(W, FIXTURE_LABELS)[2])
    W2 = _graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    u1, u2 = cohesiveness(W, FIXTURE_LABELS)[1], cohesiveness(W2, FIXTURE_LABELS)[1]
    ups, _ = composite_quality([W, W2], FIXTURE_LABELS, [0.5, 0.5])
    assert ups == pytest.approx((u1 + u2) / 2)
    with pytest.raises(Exception):
        composite_quality([W, W2], FIXTURE_LABELS, [1.0])
    with pytest.raises(DataError):
        composite_quality([W, W2], FIXTURE_LABELS, [0.7, 0.7])


def test_quality_report_json():
    rep = quality_report(FIXTURE, ["b", "b", "b", "a", "a", "a"])
    out = rep.to_json()
    assert out["labels"] == ["a", "b"]
    assert out["graph_cohesiveness"] == pytest.approx(0.25)
    assert out["ndc"] == [1, 1]


def test_graph_validation():
    with pytest.raises(DataError):
        ConnectivityGraph(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(DataError):
        ConnectivityGraph(np.array([[0.0, -1.0], [-1.0, 0.0]]))


def _random_labeled_graph(rng):
    n = int(rng.integers(3, 15))
    k = int(rng.integers(2, 5))
    A = np.triu(rng.random((n, n)) < 0.3, 1) * rng.uniform(0.1, 2.0, (n, n))
    W = A + A.T
    labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)]) if n >= k else np.arange(n)
    return W, rng.permutation(labels)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.sampled_from([0.1, 7.0, 123.0]))
def test_scale_invariance(seed, c):
    rng = np.random.default_rng(seed)
    W, labels = _random_labeled_graph(rng)
    a, b = quality_report(W, labels), quality_report(c * W, labels)
    np.testing.assert_allclose(a.per_cluster_cohesiveness, b.per_cluster_cohesiveness, rtol=1e-12, atol=1e-15)
    assert a.ndc == b.ndc
    assert a.per_cluster_connectedness == b.per_cluster_connectedness


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_adding_edges_directional(seed):
    rng = np.random.default_rng(seed)
    W, labels = _random_labeled_graph(rng)
    codes = np.unique(labels, return_inverse=True)[1]
    i, j = 0, 1
    inter = [(u, v) for u in np.flatnonzero(codes == i) for v in np.flatnonzero(codes == j)]
    u, v = inter[int(rng.integers(len(inter)))]
    W2 = W.copy()
    W2[u, v] = W2[v, u] = W[u, v] + 1.0
    assert pairwise_cohesiveness(W2, labels, i, j) <= pairwise_cohesiveness(W, labels, i, j) + 1e-15

    members = np.flatnonzero(codes == i)
    if members.size >= 2:
        u, v = rng.choice(members, 2, replace=False)
        W3 = W.copy()
        W3[u, v] = W3[v, u] = 1.0
        from schain.diagnostics import edge_stats

        h, _ = edge_stats(W, labels)
        h3, _ = edge_stats(W3, labels)
        rho = lambda h: h[i, i] / (h[i, i] + h[i, j]) if h[i, i] + h[i, j] else 0.0  # noqa: E731
        assert rho(h3) >= rho(h)
        assert connectedness(W3, labels)[0][i] >= connectedness(W, labels)[0][i]


def test_nmi_examples():
    assert nmi([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0)
    assert nmi([0, 0, 1, 1], ["x", "x", "y", "y"]) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], [0, 1, 0, 1]) == 0.0
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-15)
    assert nmi([3, 3, 3], [1, 1, 1]) == 1.0


def test_nmi_mappings():
    assert nmi({"a": 1, "b": 2}, {"b": "y", "a": "x"}) == pytest.approx(1.0)
    with pytest.raises(LabelSetMismatch):
        nmi({"a": 1, "b": 2}, {"a": 1, "c": 2})
    with pytest.raises(LabelSetMismatch):
        nmi([0, 1], [0, 1, 1])
