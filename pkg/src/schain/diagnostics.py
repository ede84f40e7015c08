"""Cohesiveness, connectedness and NMI of a labeling over connectivity graphs.

A connectivity graph is a symmetric non-negative weight matrix over the
labeled objects (typically a TSSN); its edges are the pairs ``u < v`` with
positive weight. Clusters are the label classes, numbered in sorted label
order, and cluster weights are ``beta_i = b_i / n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DataError, DimensionMismatch, LabelSetMismatch, SingleCluster
from .metapath import Tssn


@dataclass(frozen=True, eq=False)
class ConnectivityGraph:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights.weights if isinstance(self.weights, Tssn) else self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatch(f"connectivity graph must be square, got {w.shape}")
        if np.any(w < 0):
            raise DataError("connectivity weights must be non-negative")
        if not np.allclose(w, w.T, rtol=0, atol=1e-12):
            raise DataError("connectivity weights must be symmetric")
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class QualityReport:
    labels: tuple
    cluster_sizes: tuple[int, ...]
    per_cluster_cohesiveness: tuple[float, ...]
    graph_cohesiveness: float
    per_cluster_connectedness: tuple[float, ...]
    ndc: tuple[int, ...]
    graph_connectedness: float

    def to_json(self) -> dict:
        return {
            "labels": [str(x) for x in self.labels],
            "cluster_sizes": list(self.cluster_sizes),
            "per_cluster_cohesiveness": list(self.per_cluster_cohesiveness),
            "graph_cohesiveness": self.graph_cohesiveness,
            "per_cluster_connectedness": list(self.per_cluster_connectedness),
            "ndc": list(self.ndc),
            "graph_connectedness": self.graph_connectedness,
        }


def _graph(g) -> ConnectivityGraph:
    return g if isinstance(g, ConnectivityGraph) else ConnectivityGraph(g)


def encode_labels(labeling: Sequence[Hashable]) -> tuple[np.ndarray, np.ndarray]:
    """Integer codes in sorted label order and the label values themselves."""
    arr = np.asarray(list(labeling), dtype=object)
    if arr.size == 0:
        raise DataError("empty labeling")
    values = sorted(set(arr.tolist()), key=lambda x: (str(type(x)), x))
    code = {v: i for i, v in enumerate(values)}
    return np.fromiter((code[x] for x in arr), dtype=np.int64, count=arr.size), np.asarray(values, dtype=object)


def _prepared(g, labeling):
    g = _graph(g)
    codes, values = encode_labels(labeling)
    if codes.size != g.n:
        raise DimensionMismatch(f"labeling has {codes.size} objects, graph has {g.n}")
    return g, codes, values


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _pairwise(h, w, i, j) -> float:
    rho_i = _ratio(h[i, i], h[i, j] + h[i, i])
    rho_j = _ratio(h[j, j], h[i, j] + h[j, j])
    eta_i = _ratio(w[i, i], w[i, j] + w[i, i])
    eta_j = _ratio(w[j, j], w[i, j] + w[j, j])
    return rho_i * rho_j * eta_i * eta_j


def edge_stats(g, labeling) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster-pair edge counts ``h`` and weight sums ``w`` (intra totals on the diagonal)."""
    g, codes, values = _prepared(g, labeling)
    return kernels.cluster_edge_stats(g.weights, codes, values.size)


def pairwise_cohesiveness(g, labeling, i: int, j: int) -> float:
    """rho(C_i) rho(C_j) eta(C_i) eta(C_j) for clusters ``i != j`` (sorted-label indices)."""
    if i == j:
        raise DataError("pairwise cohesiveness needs two distinct clusters")
    h, w = edge_stats(g, labeling)
    return _pairwise(h, w, i, j)


def cohesiveness(g, labeling) -> tuple[np.ndarray, float]:
    g, codes, values = _prepared(g, labeling)
    k = values.size
    if k < 2:
        raise SingleCluster("cohesiveness needs at least two clusters")
    h, w = kernels.cluster_edge_stats(g.weights, codes, k)
    per = np.array([sum(_pairwise(h, w, i, j) for j in range(k) if j != i) / (k - 1) for i in range(k)])
    beta = np.bincount(codes, minlength=k) / codes.size
    return per, float(beta @ per)


def connectedness(g, labeling) -> tuple[np.ndarray, np.ndarray, float]:
    """Per-cluster connectedness, the component counts (NDC), and their beta-weighted mean."""
    g, codes, values = _prepared(g, labeling)
    k = values.size
    ndc = kernels.intra_component_counts(g.weights, codes, k)
    sizes = np.bincount(codes, minlength=k)
    psi = np.where(ndc == 1, 1.0, 1.0 - ndc / sizes)
    beta = sizes / codes.size
    return psi, ndc, float(beta @ psi)


def quality_report(g, labeling) -> QualityReport:
    g, codes, values = _prepared(g, labeling)
    per_c, ups = cohesiveness(g, labeling)
    psi, ndc, psi_g = connectedness(g, labeling)
    sizes = np.bincount(codes, minlength=values.size)
    return QualityReport(
        tuple(values.tolist()),
        tuple(int(x) for x in sizes),
        tuple(float(x) for x in per_c),
        ups,
        tuple(float(x) for x in psi),
        tuple(int(x) for x in ndc),
        psi_g,
    )


def check_weights(theta, count: int, tol: float = 1e-9) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.size != count:
        raise DimensionMismatch(f"{theta.size} weights for {count} graphs")
    if np.any(theta < -tol) or abs(theta.sum() - 1.0) > tol:
        raise DataError(f"graph weights must be non-negative and sum to 1, got {theta}")
    return theta


def composite_quality(graphs: Sequence, labeling, theta=None) -> tuple[float, float]:
    """theta-weighted cohesiveness and connectedness over several graphs (uniform by default)."""
    if theta is None:
        theta = np.full(len(graphs), 1.0 / len(graphs))
    theta = check_weights(theta, len(graphs))
    ups = np.array([cohesiveness(g, labeling)[1] for g in graphs])
    psi = np.array([connectedness(g, labeling)[2] for g in graphs])
    return float(theta @ ups), float(theta @ psi)


def _align(a, b) -> tuple[list, list]:
    if isinstance(a, Mapping) or isinstance(b, Mapping):
        if not (isinstance(a, Mapping) and isinstance(b, Mapping)):
            raise LabelSetMismatch("compare two id->label mappings or two sequences")
        if set(a) != set(b):
            raise LabelSetMismatch(
                f"labelings cover different objects ({len(set(a) ^ set(b))} differ)"
            )
        keys = sorted(a)
        return [a[x] for x in keys], [b[x] for x in keys]
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise LabelSetMismatch(f"labelings have {len(a)} and {len(b)} objects")
    return a, b


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return -math.fsum(p * np.log(p))


def nmi(a, b) -> float:
    """2 I(a; b) / (H(a) + H(b)) in nats; 1 when both labelings are constant, 0 when one is."""
    a, b = _align(a, b)
    ca, va = encode_labels(a)
    cb, vb = encode_labels(b)
    n = ca.size
    table = np.zeros((va.size, vb.size))
    np.add.at(table, (ca, cb), 1.0)
    pxy = table / n
    px, py = pxy.sum(axis=1), pxy.sum(axis=0)
    ha, hb = _entropy(px), _entropy(py)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    nz = pxy > 0
    # exactly rounded sums keep nmi(a, b) == nmi(b, a) bit for bit
    mi = math.fsum(pxy[nz] * np.log(pxy[nz] / np.outer(px, py)[nz]))
    return float(min(1.0, max(0.0, 2.0 * mi / (ha + hb))))
