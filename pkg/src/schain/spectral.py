"""Cluster indicators from the relaxed trace maximization.

For fixed weights the top-k eigenvectors of
``K = D^-1/2 (S + W o S) D^-1/2`` span the relaxed optimum; rows of the
back-transformed, normalized eigenvectors are then clustered by k-means.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import DataError, DimensionMismatch, EigenSolverError

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class ClusterIndicators:
    """Hard partition of ``n`` objects into ``k`` non-empty clusters."""

    labels: np.ndarray  # (n,) int64 in 0..k-1
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise DimensionMismatch("labels must be a non-empty vector")
        if labels.min() < 0 or labels.max() >= self.k:
            raise DataError(f"labels outside 0..{self.k - 1}")
        if np.bincount(labels, minlength=self.k).min() == 0:
            raise DataError("empty cluster in partition")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def z(self) -> np.ndarray:
        """``(k, n)`` 0/1 indicator vectors."""
        z = np.zeros((self.k, self.n))
        z[self.labels, np.arange(self.n)] = 1.0
        return z

    @classmethod
    def canonical(cls, labels, k: int) -> "ClusterIndicators":
        """Relabel so clusters are numbered in order of their first member."""
        labels = np.asarray(labels, dtype=np.int64)
        _, first = np.unique(labels, return_index=True)
        order = labels[np.sort(first)]
        remap = np.empty(max(k, labels.max() + 1), dtype=np.int64)
        remap[order] = np.arange(order.size)
        return cls(remap[labels], k)


@dataclass(frozen=True)
class SpectralEmbedding:
    U: np.ndarray  # (n, k)
    eigenvalues: np.ndarray  # (k,) descending


def build_affinity(S, WS, d) -> np.ndarray:
    """``K = D^-1/2 (S + WS) D^-1/2`` for a diagonal ``D`` given as its diagonal ``d``."""
    A = np.asarray(S, dtype=np.float64) + np.asarray(WS, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"affinity must be square, got {A.shape}")
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL:
        raise DataError("S + W o S is not symmetric")
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    if d.shape[0] != A.shape[0]:
        raise DimensionMismatch("degree vector does not match affinity size")
    if np.any(d <= 0):
        raise DataError("degrees must be positive")
    inv = 1.0 / np.sqrt(d)
    K = inv[:, None] * A * inv[None, :]
    return 0.5 * (K + K.T)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def top_k_eigvecs(K, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the top-``k`` invariant subspace, eigenvalues descending."""
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    if k > n:
        raise DataError(f"k={k} exceeds matrix size {n}")
    if k < 1:
        raise DataError("k must be positive")
    if np.max(np.abs(K - K.T), initial=0.0) > SYMMETRY_TOL:
        raise DataError("K is not symmetric")
    try:
        vals, vecs = scipy.linalg.eigh(K, subset_by_index=[n - k, n - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"symmetric eigensolver failed: {exc}") from exc
    return _fix_signs(vecs[:, ::-1]), vals[::-1].copy()


def _normalize(X: np.ndarray, axis: int) -> np.ndarray:
    norms = np.linalg.norm(X, axis=axis, keepdims=True)
    return np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)


def relax_to_features(Z, d, eigenvalues=None) -> SpectralEmbedding:
    """Column- then row-normalized ``D^-1/2 Z``; zero rows stay zero."""
    Z = np.asarray(Z, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    U = Z / np.sqrt(d)[:, None]
    U = _normalize(_normalize(U, axis=0), axis=1)
    ev = np.asarray(eigenvalues if eigenvalues is not None else np.full(Z.shape[1], np.nan))
    return SpectralEmbedding(U, ev)


def _kmeanspp(U, k, rng):
    """Greedy k-means++ seeding; coincident points fall back to the lowest unused index."""
    n = U.shape[0]
    n_local = 2 + int(np.log(k))
    first = int(rng.integers(n))
    centers = [first]
    closest = np.sum((U - U[first]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            used = set(centers)
            pick = next(i for i in range(n) if i not in used)
            centers.append(pick)
            closest = np.minimum(closest, np.sum((U - U[pick]) ** 2, axis=1))
            continue
        cumulative = np.cumsum(closest)
        draws = rng.random(n_local) * total
        cand = np.minimum(np.searchsorted(cumulative, draws, side="right"), n - 1)
        best, best_pot, best_closest = None, np.inf, None
        for c in cand:
            new_closest = np.minimum(closest, np.sum((U - U[c]) ** 2, axis=1))
            pot = new_closest.sum()
            if pot < best_pot:
                best, best_pot, best_closest = int(c), pot, new_closest
        centers.append(best)
        closest = best_closest
    return U[centers].copy()


def _repair_empty(U, labels, d2, k):
    """Move the farthest point of the largest cluster into each empty cluster."""
    counts = np.bincount(labels, minlength=k)
    while counts.min() == 0:
        empty = int(np.argmin(counts))
        largest = int(np.argmax(counts))
        members = np.flatnonzero(labels == largest)
        far = int(members[np.argmax(d2[members])])
        labels[far] = empty
        d2[far] = 0.0
        counts[largest] -= 1
        counts[empty] += 1
    return labels


def _centers(U, labels, k):
    C = np.zeros((k, U.shape[1]))
    np.add.at(C, labels, U)
    return C / np.bincount(labels, minlength=k)[:, None]


def _lloyd(U, centers, k, max_iter):
    labels = None
    for _ in range(max_iter):
        new, d2 = kernels.assign_labels(U, centers)
        new = _repair_empty(U, new.copy(), d2.copy(), k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = _centers(U, labels, k)
    wcss = float(np.sum((U - centers[labels]) ** 2))
    return labels, wcss


def kmeans_assign(U, k: int, seed: int = 0, restarts: int = 10, max_iter: int = 300) -> ClusterIndicators:
    """Best-of-``restarts`` Lloyd k-means by within-cluster sum of squares."""
    U = np.ascontiguousarray(U, dtype=np.float64)
    n = U.shape[0]
    if k > n:
        raise DataError(f"k={k} exceeds the number of objects {n}")
    if k == n:
        return ClusterIndicators(np.arange(n), k)
    rng = np.random.default_rng(seed)
    best_labels, best_wcss = None, np.inf
    for _ in range(max(1, restarts)):
        centers = _kmeanspp(U, k, rng)
        labels, wcss = _lloyd(U, centers, k, max_iter)
        if wcss < best_wcss - 1e-12 * max(1.0, best_wcss if np.isfinite(best_wcss) else 0.0):
            best_labels, best_wcss = labels, wcss
    return ClusterIndicators.canonical(best_labels, k)


def spectral_step(S, WS, d, k: int, seed: int = 0, restarts: int = 10) -> tuple[ClusterIndicators, SpectralEmbedding]:
    K = build_affinity(S, WS, d)
    Z, vals = top_k_eigvecs(K, k)
    emb = relax_to_features(Z, d, vals)
    return kmeans_assign(emb.U, k, seed=seed, restarts=restarts), emb
