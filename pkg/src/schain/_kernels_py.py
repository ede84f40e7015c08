"""Pure numpy implementations of the hot kernels.

Signatures and results match :mod:`schain._kernels_cy`; see
:mod:`schain.kernels` for backend selection.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def frac_eval(Nc, Qc, q0, theta, shift, gamma):
    """Value and gradient of the fractional program's numerator and denominator.

    With ``Q_r = q0_r + Qc_r . theta`` and ``N_r = Nc_r . theta``::

        g = prod_r Q_r
        f = sum_r N_r prod_{s != r} Q_s + (shift - gamma |theta|^2) g

    Returns ``(f, g, grad_f, grad_g)``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    k = Qc.shape[0]
    Q = q0 + Qc @ theta
    N = Nc @ theta

    # prod over s not in {r, t}; the diagonal holds prod over s != r
    excl = np.ones((k, k))
    for r in range(k):
        for t in range(k):
            for s in range(k):
                if s != r and s != t:
                    excl[r, t] *= Q[s]
    P = np.diag(excl).copy()
    g = P[0] * Q[0] if k else 1.0

    grad_g = P @ Qc
    reg = shift - gamma * float(theta @ theta)
    f = float(N @ P) + reg * g

    grad_f = P @ Nc + reg * grad_g - 2.0 * gamma * g * theta
    for r in range(k):
        for t in range(k):
            if t != r:
                grad_f += N[r] * excl[r, t] * Qc[t]
    return float(f), float(g), grad_f, grad_g


def assign_labels(U, centers):
    """Nearest-center labels (ties to the lowest index) and squared distances."""
    diff = U[:, None, :] - centers[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diff, diff)
    labels = np.argmin(d2, axis=1).astype(np.int64)
    return labels, d2[np.arange(U.shape[0]), labels]


def cluster_edge_stats(W, labels, k):
    """Edge counts ``h`` and weight sums ``w`` between every pair of clusters.

    Only pairs ``u < v`` with ``W[u, v] > 0`` are edges. Diagonal entries
    hold intra-cluster totals; off-diagonal entries are symmetric.
    """
    W = np.asarray(W, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    Y = np.zeros((W.shape[0], k))
    Y[np.arange(W.shape[0]), labels] = 1.0
    upper = np.triu(W, 1)
    upper = np.where(upper > 0, upper, 0.0)
    E = (upper > 0).astype(np.float64)
    H = Y.T @ E @ Y
    S = Y.T @ upper @ Y
    h = H + H.T - np.diag(np.diag(H))
    w = S + S.T - np.diag(np.diag(S))
    return np.rint(h).astype(np.int64), w


def intra_component_counts(W, labels, k):
    """Number of connected components of each cluster using intra-cluster edges only."""
    W = np.asarray(W)
    labels = np.asarray(labels, dtype=np.int64)
    n = W.shape[0]
    u, v = np.nonzero(np.triu(W, 1) > 0)
    keep = labels[u] == labels[v]
    g = coo_matrix((np.ones(int(keep.sum())), (u[keep], v[keep])), shape=(n, n))
    _, comp = connected_components(g, directed=False)
    ndc = np.zeros(k, dtype=np.int64)
    for c in range(k):
        ndc[c] = np.unique(comp[labels == c]).size
    return ndc
