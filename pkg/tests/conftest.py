from __future__ import annotations

import itertools
from collections import defaultdict

import numpy as np
import pytest

from schain import MetaPath, parse_hin

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record a one-line acceptance verdict; printed in the terminal summary."""

    def _report(criterion: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def hin_from_edges(nodes: list[tuple[str, str]], edges: list[tuple[str, str]], attrs=None):
    node_text = "".join(f"{i}\t{t}\n" for i, t in nodes)
    edge_text = "".join(f"{u}\t{v}\n" for u, v in edges)
    return parse_hin(node_text, edge_text, attrs or {})


def random_hin(rng, n_types=3, max_n=12, density=0.35, self_links=False):
    """Random HIN with types T0.. (T0 is the target); chain schema T0-T1-T2 plus extra links."""
    types = [f"T{i}" for i in range(n_types)]
    nodes = []
    for t in types:
        for i in range(int(rng.integers(1, max_n + 1))):
            nodes.append((f"{t.lower()}{i}", t))
    by_type = defaultdict(list)
    for oid, t in nodes:
        by_type[t].append(oid)
    pairs = [(types[i], types[i + 1]) for i in range(n_types - 1)]
    if n_types > 2 and rng.random() < 0.5:
        pairs.append((types[0], types[2]))
    if self_links:
        pairs.append((types[0], types[0]))
    edges = set()
    for a, b in pairs:
        added = False
        for u in by_type[a]:
            for v in by_type[b]:
                if u != v and rng.random() < density:
                    edges.add((u, v) if a != b else tuple(sorted((u, v))))
                    added = True
        if not added and by_type[a][0] != by_type[b][-1]:
            edges.add((by_type[a][0], by_type[b][-1]))
    return hin_from_edges(nodes, sorted(edges))


def random_symmetric_metapath(rng, schema, target, max_len=5):
    """Random palindromic walk on the schema graph starting at ``target`` (odd length <= max_len)."""
    adj = defaultdict(list)
    for a, b in sorted(schema.link_types):
        adj[a].append(b)
        if a != b:
            adj[b].append(a)
    half_steps = int(rng.integers(1, (max_len - 1) // 2 + 1))
    seq = [target]
    for _ in range(half_steps):
        nbrs = adj[seq[-1]]
        seq.append(nbrs[int(rng.integers(len(nbrs)))])
    full = seq + seq[-2::-1]
    return MetaPath(tuple(full))


def dfs_count(hin, path: MetaPath) -> np.ndarray:
    """Independent oracle: enumerate every typed walk following the type sequence."""
    seq = path.type_sequence
    nbr = {}
    for a, b in zip(seq, seq[1:]):
        m = hin.incidence(a, b).tocsr()
        nbr[(a, b)] = [list(m.indices[m.indptr[i] : m.indptr[i + 1]]) for i in range(m.shape[0])]
    n = hin.n(seq[0])
    out = np.zeros((n, n), dtype=np.int64)

    def walk(pos, node, start):
        if pos == len(seq) - 1:
            out[start, node] += 1
            return
        for nxt in nbr[(seq[pos], seq[pos + 1])][node]:
            walk(pos + 1, nxt, start)

    for s in range(n):
        walk(0, s, s)
    return out


def simplex_grid(dim: int, step: float = 0.05) -> np.ndarray:
    """All points of the probability simplex in R^dim with coordinates in multiples of ``step``."""
    if dim == 0:
        return np.zeros((1, 0))
    m = int(round(1 / step))
    pts = []
    for bars in itertools.combinations(range(m + dim - 1), dim - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(m + dim - 2 - prev)
        pts.append(parts)
    return np.asarray(pts, dtype=float) / m


def grid_best_ratio(fp, step: float = 0.05) -> float:
    """Best f/g over the product grid of the two simplices (brute force)."""
    lam = simplex_grid(fp.num_metapaths, step)
    om = simplex_grid(fp.num_attrs, step)
    best = -np.inf
    for l in lam:
        thetas = np.hstack([np.repeat(l[None, :], om.shape[0], axis=0), om])
        Q = fp.q0[None, :] + thetas @ fp.Qc.T
        N = thetas @ fp.Nc.T
        vals = (N / Q).sum(axis=1) + fp.shift - fp.gamma * (thetas**2).sum(axis=1)
        best = max(best, float(vals.max()))
    return best


def planted_hin(rng, n, k, num_paths=2, num_attrs=0, noise=0.15, papers_per_group=4):
    """Authors in ``k`` planted groups linked to group papers (plus noisy cross links).

    Types: A (target), P, V, T. Meta-paths are chosen from A-P-A, A-P-V-P-A, A-P-T-P-A.
    Returns (hin, metapath strings, true labels).
    """
    labels = np.sort(rng.integers(0, k, n))
    labels[:k] = np.arange(k)
    nodes = [(f"a{i}", "A") for i in range(n)]
    papers = {g: [f"p{g}_{j}" for j in range(papers_per_group)] for g in range(k)}
    for g in range(k):
        nodes += [(p, "P") for p in papers[g]]
    venues = [f"v{g}" for g in range(k)]
    terms = [f"t{j}" for j in range(2 * k)]
    nodes += [(v, "V") for v in venues] + [(t, "T") for t in terms]
    edges = set()
    all_papers = [p for g in range(k) for p in papers[g]]
    for i, g in enumerate(labels):
        own = papers[int(g)]
        edges.add((f"a{i}", own[int(rng.integers(len(own)))]))
        for p in own:
            if rng.random() < 0.4:
                edges.add((f"a{i}", p))
        for p in all_papers:
            if p not in own and rng.random() < noise * 0.3:
                edges.add((f"a{i}", p))
    for g in range(k):
        for p in papers[g]:
            edges.add((p, venues[g] if rng.random() > noise else venues[int(rng.integers(k))]))
            for t in terms:
                if rng.random() < 0.3:
                    edges.add((p, t))
    attrs = {}
    if num_attrs:
        rows = []
        for i, g in enumerate(labels):
            vals = [g + rng.normal(0, 0.4) if j == 0 else rng.random() for j in range(num_attrs)]
            rows.append(f"a{i}\t" + "\t".join(repr(float(v)) for v in vals) + "\n")
        attrs["A"] = "".join(rows)
    hin = hin_from_edges(nodes, sorted(edges), attrs)
    choices = ["A-P-A", "A-P-V-P-A", "A-P-T-P-A"]
    paths = choices[:num_paths]
    return hin, paths, labels


def random_model(rng, n, p, q, alpha=None, gamma=0.0, n_constraints=None):
    """Linear similarity model with random symmetric path similarities and attributes."""
    from schain import assemble, attribute_components

    paths = []
    for _ in range(p):
        m = rng.random((n, n))
        m = (m + m.T) / 2
        np.fill_diagonal(m, 1.0)
        paths.append(m)
    attrs = attribute_components(rng.normal(size=(n, q))) if q else []
    W = np.zeros((n, n))
    for _ in range(n if n_constraints is None else n_constraints):
        u, v = rng.choice(n, 2, replace=False)
        W[u, v] = W[v, u] = rng.choice([-1, 1])
    if alpha is None:
        alpha = float(rng.uniform(0.1, 0.9)) if p and q else 0.5
    return assemble(paths, attrs, W, alpha=alpha, gamma=gamma)


def random_partition(rng, n, k):
    from schain import ClusterIndicators

    labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    return ClusterIndicators(rng.permutation(labels), k)


def random_feasible(rng, p, q):
    lam = rng.dirichlet(np.ones(p)) if p else np.zeros(0)
    om = rng.dirichlet(np.ones(q)) if q else np.zeros(0)
    return np.concatenate([lam, om])
