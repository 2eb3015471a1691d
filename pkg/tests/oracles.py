"""Slow, obviously-correct reference implementations used by the tests."""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy import stats


def reciprocal_edges(src, dst) -> set[frozenset]:
    directed = {(int(a), int(b)) for a, b in zip(src, dst) if a != b}
    return {frozenset((a, b)) for a, b in directed if (b, a) in directed}


def adjacency_sets(edges) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for e in edges:
        a, b = tuple(e)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    return adj


def floyd_warshall(edges) -> tuple[list[int], np.ndarray]:
    adj = adjacency_sets(edges)
    nodes = sorted(adj)
    pos = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0)
    for u, nbrs in adj.items():
        for v in nbrs:
            dist[pos[u], pos[v]] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, [k]] + dist[[k], :])
    return nodes, dist


def pairs_at_distance(edges, d) -> set[tuple[int, int]]:
    nodes, dist = floyd_warshall(edges)
    ii, jj = np.nonzero(dist == d)
    return {(nodes[i], nodes[j]) for i, j in zip(ii, jj) if nodes[i] < nodes[j]}


def components(edges) -> list[set[int]]:
    adj = adjacency_sets(edges)
    parent = {u: u for u in adj}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = tuple(e)
        parent[find(a)] = find(b)
    groups: dict[int, set[int]] = {}
    for u in adj:
        groups.setdefault(find(u), set()).add(u)
    return list(groups.values())


def stats_bruteforce(edges) -> dict:
    adj = adjacency_sets(edges)
    nodes = sorted(adj)
    n, m = len(nodes), len(edges)
    if n == 0:
        return {"n_nodes": 0}
    triangles = sum(1 for a, b, c in combinations(nodes, 3) if b in adj[a] and c in adj[a] and c in adj[b])
    triples = 0
    for c in nodes:
        for a, b in combinations(sorted(adj[c]), 2):
            triples += 1
    comps = components(edges)
    k = {u: len(adj[u]) for u in nodes}
    x, y = [], []
    for e in edges:
        a, b = tuple(e)
        x += [k[a], k[b]]
        y += [k[b], k[a]]
    sp = pe = None
    if len(set(x)) > 1:
        sp = float(stats.spearmanr(x, y)[0])
        pe = float(stats.pearsonr(x, y)[0])
    return {
        "n_nodes": n,
        "n_edges": m,
        "mean_degree": 2 * m / n,
        "max_degree": max(k.values()),
        "global_clustering": 3 * triangles / triples if triples else None,
        "n_components": len(comps),
        "giant_fraction": max(len(c) for c in comps) / n,
        "degree_assortativity_spearman": sp,
        "degree_assortativity_pearson": pe,
    }


def rank_then_pearson(x, y) -> float | None:
    """Spearman by explicit average ranks and the textbook product-moment formula."""

    def ranks(v):
        v = list(v)
        order = sorted(range(len(v)), key=lambda i: v[i])
        out = [0.0] * len(v)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
                j += 1
            for t in range(i, j + 1):
                out[order[t]] = (i + j) / 2 + 1
            i = j + 1
        return out

    rx, ry = ranks(x), ranks(y)
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0 or syy == 0:
        return None
    return sxy / (sxx * syy) ** 0.5


def dense_adjacency(edges) -> tuple[list[int], np.ndarray]:
    nodes = sorted({u for e in edges for u in e})
    pos = {u: i for i, u in enumerate(nodes)}
    a = np.zeros((len(nodes), len(nodes)), dtype=np.int64)
    for e in edges:
        x, y = tuple(e)
        a[pos[x], pos[y]] = a[pos[y], pos[x]] = 1
    return nodes, a


def dense_pairs_by_distance(edges, max_d: int = 3) -> dict[int, set[tuple[int, int]]]:
    """Exact-distance pairs from boolean powers of the dense adjacency matrix."""
    nodes, a = dense_adjacency(edges)
    n = len(nodes)
    seen = np.eye(n, dtype=bool)
    frontier = np.eye(n, dtype=np.int64)
    out = {}
    for d in range(1, max_d + 1):
        frontier = ((frontier @ a) > 0) & ~seen
        seen |= frontier
        ii, jj = np.nonzero(np.triu(frontier, 1))
        out[d] = {(nodes[i], nodes[j]) for i, j in zip(ii, jj)}
        frontier = frontier.astype(np.int64)
    return out


def stats_dense(edges) -> dict:
    """stats_bruteforce with triangles from trace(A^3) instead of enumeration."""
    nodes, a = dense_adjacency(edges)
    if not nodes:
        return {"n_nodes": 0}
    k = a.sum(axis=1)
    triangles = int(np.trace(a @ a @ a)) // 6
    triples = int(sum(x * (x - 1) // 2 for x in k.tolist()))
    comps = components(edges)
    x, y = [], []
    pos = {u: i for i, u in enumerate(nodes)}
    for e in edges:
        p, q = (pos[u] for u in e)
        x += [k[p], k[q]]
        y += [k[q], k[p]]
    sp = pe = None
    if len(set(x)) > 1:
        sp = float(stats.spearmanr(x, y)[0])
        pe = float(stats.pearsonr(x, y)[0])
    return {
        "n_nodes": len(nodes),
        "n_edges": len(edges),
        "mean_degree": 2 * len(edges) / len(nodes),
        "max_degree": int(k.max()),
        "global_clustering": 3 * triangles / triples if triples else None,
        "n_components": len(comps),
        "giant_fraction": max(len(c) for c in comps) / len(nodes),
        "degree_assortativity_spearman": sp,
        "degree_assortativity_pearson": pe,
    }
