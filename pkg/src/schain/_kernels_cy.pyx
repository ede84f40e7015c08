# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contracts as ``schain._kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def frac_eval(Nc_in, Qc_in, q0_in, theta_in, double shift, double gamma):
    cdef const double[:, ::1] Nc = np.ascontiguousarray(Nc_in, dtype=np.float64)
    cdef const double[:, ::1] Qc = np.ascontiguousarray(Qc_in, dtype=np.float64)
    cdef const double[::1] q0 = np.ascontiguousarray(q0_in, dtype=np.float64)
    cdef const double[::1] theta = np.ascontiguousarray(theta_in, dtype=np.float64)
    cdef Py_ssize_t k = Qc.shape[0], m = Qc.shape[1]
    cdef Py_ssize_t r, t, s, c
    cdef double[::1] Q = np.empty(k)
    cdef double[::1] N = np.empty(k)
    cdef double[:, ::1] excl = np.ones((k, k))
    grad_f_arr = np.zeros(m)
    grad_g_arr = np.zeros(m)
    cdef double[::1] grad_f = grad_f_arr
    cdef double[::1] grad_g = grad_g_arr
    cdef double acc_q, acc_n, g, f, reg, sq, coef

    for r in range(k):
        acc_q = q0[r]
        acc_n = 0.0
        for c in range(m):
            acc_q += Qc[r, c] * theta[c]
            acc_n += Nc[r, c] * theta[c]
        Q[r] = acc_q
        N[r] = acc_n

    for r in range(k):
        for t in range(k):
            for s in range(k):
                if s != r and s != t:
                    excl[r, t] *= Q[s]

    g = excl[0, 0] * Q[0] if k > 0 else 1.0
    sq = 0.0
    for c in range(m):
        sq += theta[c] * theta[c]
    reg = shift - gamma * sq

    f = 0.0
    for r in range(k):
        f += N[r] * excl[r, r]
        for c in range(m):
            grad_g[c] += excl[r, r] * Qc[r, c]
            grad_f[c] += excl[r, r] * Nc[r, c]
    f += reg * g

    for c in range(m):
        grad_f[c] += reg * grad_g[c] - 2.0 * gamma * g * theta[c]
    for r in range(k):
        for t in range(k):
            if t != r:
                coef = N[r] * excl[r, t]
                for c in range(m):
                    grad_f[c] += coef * Qc[t, c]
    return f, g, grad_f_arr, grad_g_arr


def assign_labels(U_in, centers_in):
    cdef const double[:, ::1] U = np.ascontiguousarray(U_in, dtype=np.float64)
    cdef const double[:, ::1] centers = np.ascontiguousarray(centers_in, dtype=np.float64)
    cdef Py_ssize_t n = U.shape[0], d = U.shape[1], k = centers.shape[0]
    cdef Py_ssize_t i, j, c, best
    cdef double dist, diff, best_d
    labels_arr = np.empty(n, dtype=np.int64)
    d2_arr = np.empty(n)
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] d2 = d2_arr
    for i in range(n):
        best = 0
        best_d = 0.0
        for j in range(k):
            dist = 0.0
            for c in range(d):
                diff = U[i, c] - centers[j, c]
                dist += diff * diff
            if j == 0 or dist < best_d:
                best = j
                best_d = dist
        labels[i] = best
        d2[i] = best_d
    return labels_arr, d2_arr


def cluster_edge_stats(W_in, labels_in, Py_ssize_t k):
    cdef const double[:, ::1] W = np.ascontiguousarray(W_in, dtype=np.float64)
    cdef const cnp.int64_t[::1] labels = np.ascontiguousarray(labels_in, dtype=np.int64)
    cdef Py_ssize_t n = W.shape[0], u, v, a, b
    cdef double x
    h_arr = np.zeros((k, k), dtype=np.int64)
    w_arr = np.zeros((k, k))
    cdef cnp.int64_t[:, ::1] h = h_arr
    cdef double[:, ::1] w = w_arr
    for u in range(n):
        a = labels[u]
        for v in range(u + 1, n):
            x = W[u, v]
            if x > 0:
                b = labels[v]
                h[a, b] += 1
                w[a, b] += x
                if a != b:
                    h[b, a] += 1
                    w[b, a] += x
    return h_arr, w_arr


cdef Py_ssize_t _find(cnp.int64_t[::1] parent, Py_ssize_t x) noexcept nogil:
    cdef Py_ssize_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def intra_component_counts(W_in, labels_in, Py_ssize_t k):
    cdef const double[:, ::1] W = np.ascontiguousarray(W_in, dtype=np.float64)
    cdef const cnp.int64_t[::1] labels = np.ascontiguousarray(labels_in, dtype=np.int64)
    cdef Py_ssize_t n = W.shape[0], u, v, ru, rv
    parent_arr = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] parent = parent_arr
    ndc_arr = np.zeros(k, dtype=np.int64)
    cdef cnp.int64_t[::1] ndc = ndc_arr
    for u in range(n):
        ndc[labels[u]] += 1
    for u in range(n):
        for v in range(u + 1, n):
            if W[u, v] > 0 and labels[u] == labels[v]:
                ru = _find(parent, u)
                rv = _find(parent, v)
                if ru != rv:
                    if ru < rv:
                        parent[rv] = ru
                    else:
                        parent[ru] = rv
                    ndc[labels[u]] -= 1
    return ndc_arr
