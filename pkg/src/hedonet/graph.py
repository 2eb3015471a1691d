"""Reciprocal-reply networks: construction, statistics and distance classes."""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, Union
from xml.sax.saxutils import escape

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ._corr import paired_correlations
from .ingest import ReplyEvent

log = logging.getLogger(__name__)

# upper bound on frontier entries expanded per block of BFS sources
PAIR_BLOCK_BUDGET = 4_000_000


@dataclass(frozen=True, eq=False)
class ReplyGraph:
    """Undirected simple graph over user ids.

    Nodes are held as a sorted uint64 array; adjacency is CSR over node
    positions with sorted neighbour lists.  Every node has degree >= 1.
    """

    nodes: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, u, v) -> "ReplyGraph":
        """Build from endpoint id arrays; self-loops and repeats are dropped."""
        u = np.asarray(u, dtype=np.uint64)
        v = np.asarray(v, dtype=np.uint64)
        keep = u != v
        lo = np.minimum(u[keep], v[keep])
        hi = np.maximum(u[keep], v[keep])
        if lo.size == 0:
            return cls.empty()
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
        nodes = np.unique(pairs)
        a = np.searchsorted(nodes, pairs[:, 0])
        b = np.searchsorted(nodes, pairs[:, 1])
        return cls._from_index_edges(nodes, a, b)

    @classmethod
    def _from_index_edges(cls, nodes, a, b) -> "ReplyGraph":
        n = nodes.size
        rows = np.concatenate([a, b])
        cols = np.concatenate([b, a])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(nodes, indptr, cols.astype(np.int64))

    @classmethod
    def empty(cls) -> "ReplyGraph":
        return cls(np.zeros(0, dtype=np.uint64), np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size // 2)

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def index_of(self, user_id: int) -> int:
        pos = int(np.searchsorted(self.nodes, np.uint64(user_id)))
        if pos >= self.nodes.size or int(self.nodes[pos]) != int(user_id):
            raise KeyError(user_id)
        return pos

    def neighbors(self, user_id: int) -> list[int]:
        i = self.index_of(user_id)
        return [int(x) for x in self.nodes[self.indices[self.indptr[i] : self.indptr[i + 1]]]]

    def edge_index_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Each edge once as node positions (a < b), in CSR order."""
        rows = np.repeat(np.arange(self.n_nodes), self.degrees())
        keep = rows < self.indices
        return rows[keep], self.indices[keep]

    def edges(self) -> list[tuple[int, int]]:
        a, b = self.edge_index_pairs()
        return list(zip(self.nodes[a].tolist(), self.nodes[b].tolist()))

    def edge_set(self) -> set[frozenset]:
        return {frozenset(e) for e in self.edges()}

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n_nodes, self.n_nodes))


def build_reciprocal(events: Union[Iterable[ReplyEvent], tuple]) -> ReplyGraph:
    """Link u and v iff u replied to v and v replied to u; self-replies dropped.

    ``events`` is an iterable of ReplyEvent or a (from_users, to_users) pair
    of sequences.
    """
    if isinstance(events, tuple) and len(events) == 2:
        src = np.asarray(events[0], dtype=np.uint64)
        dst = np.asarray(events[1], dtype=np.uint64)
    else:
        pairs = [(e.from_user, e.to_user) for e in events]
        src = np.fromiter((p[0] for p in pairs), dtype=np.uint64, count=len(pairs))
        dst = np.fromiter((p[1] for p in pairs), dtype=np.uint64, count=len(pairs))
    keep = src != dst
    src, dst = src[keep], dst[keep]
    if src.size == 0:
        return ReplyGraph.empty()
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    forward = (src < dst).astype(np.uint64)
    directed = np.unique(np.stack([lo, hi, forward], axis=1), axis=0)
    # after dedup a pair appearing twice carries both directions
    same = np.all(directed[1:, :2] == directed[:-1, :2], axis=1)
    recip = directed[1:][same][:, :2]
    if recip.size == 0:
        return ReplyGraph.empty()
    return ReplyGraph.from_edges(recip[:, 0], recip[:, 1])


@dataclass(frozen=True)
class NetworkStats:
    n_nodes: int
    n_edges: int
    mean_degree: float | None
    max_degree: int | None
    global_clustering: float | None
    n_components: int
    giant_fraction: float | None
    degree_assortativity_spearman: float | None
    degree_assortativity_pearson: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def triangle_count(g: ReplyGraph) -> int:
    if g.n_edges == 0:
        return 0
    a = g.adjacency()
    return int((a @ a).multiply(a).sum()) // 6


def connected_triples(g: ReplyGraph) -> int:
    k = g.degrees().astype(np.int64)
    return int(np.sum(k * (k - 1) // 2))


def compute_stats(g: ReplyGraph) -> NetworkStats:
    n, m = g.n_nodes, g.n_edges
    if n == 0:
        return NetworkStats(0, 0, None, None, None, 0, None, None, None)
    k = g.degrees()
    triples = connected_triples(g)
    clustering = 3.0 * triangle_count(g) / triples if triples else None
    n_comp, labels = connected_components(g.adjacency(), directed=False)
    giant = np.bincount(labels).max()
    a, b = g.edge_index_pairs()
    spearman, pearson = paired_correlations(k.astype(float), a, b)
    return NetworkStats(
        n_nodes=n,
        n_edges=m,
        mean_degree=2.0 * m / n,
        max_degree=int(k.max()),
        global_clustering=clustering,
        n_components=int(n_comp),
        giant_fraction=float(giant / n),
        degree_assortativity_spearman=spearman,
        degree_assortativity_pearson=pearson,
    )


# ---------------------------------------------------------------- distances


def _source_blocks(g: ReplyGraph, sources: np.ndarray, max_d: int, budget: int) -> Iterator[np.ndarray]:
    """Split sources so that the walk count bound per block stays within budget."""
    k = g.degrees().astype(np.float64)
    walks = k.copy()
    a = g.adjacency().astype(np.float64)
    for _ in range(max_d - 1):
        walks = walks + a @ walks
    cost = walks[sources] + 1.0
    start = 0
    acc = 0.0
    for i, c in enumerate(cost):
        if acc and acc + c > budget:
            yield sources[start:i]
            start, acc = i, 0.0
        acc += c
    if start < sources.size:
        yield sources[start:]


def distance_pair_blocks(
    g: ReplyGraph,
    max_d: int = 3,
    mask: np.ndarray | None = None,
    budget: int = PAIR_BLOCK_BUDGET,
) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (d, a, b) blocks of node-position pairs with a < b at exact
    shortest-path distance d, for d = 1..max_d.

    Breadth-first expansion runs for a block of sources at a time as sparse
    frontier products, so memory is bounded by the block's reach rather than
    N x N.  With ``mask`` only pairs whose endpoints are both masked are
    emitted (traversal still passes through every node).
    """
    if max_d < 1:
        raise ValueError("max_d must be >= 1")
    n = g.n_nodes
    if n == 0:
        return
    if mask is None:
        mask = np.ones(n, dtype=bool)
    sources = np.flatnonzero(mask)
    if sources.size == 0:
        return
    adj = g.adjacency().astype(np.int32)
    for block in _source_blocks(g, sources, max_d, budget):
        b = block.size
        seen = sp.csr_matrix((np.ones(b, dtype=np.int32), (np.arange(b), block)), shape=(b, n))
        frontier = seen
        for d in range(1, max_d + 1):
            reach = frontier @ adj
            reach.data[:] = 1
            new = reach - reach.multiply(seen)
            new.eliminate_zeros()
            new = new.tocoo()
            rows, cols = new.row, new.col
            src = block[rows]
            keep = (cols > src) & mask[cols]
            if keep.any():
                order = np.lexsort((cols[keep], src[keep]))
                yield d, src[keep][order], cols[keep][order]
            if d < max_d:
                frontier = sp.csr_matrix((np.ones(rows.size, dtype=np.int32), (rows, cols)), shape=(b, n))
                seen = seen + frontier
                seen.data[:] = 1


def exact_distance_pairs(g: ReplyGraph, d: int) -> Iterator[tuple[int, int]]:
    """Stream unordered user-id pairs whose shortest path has exactly d links."""
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2 or 3")
    for dist, a, b in distance_pair_blocks(g, d):
        if dist == d:
            yield from zip(g.nodes[a].tolist(), g.nodes[b].tolist())


# ---------------------------------------------------------------- degree CCDF


def ccdf(degrees) -> list[tuple[int, float]]:
    """(k, P(K >= k)) for every distinct observed k, ascending."""
    data = np.asarray(degrees, dtype=np.int64)
    if data.size == 0:
        raise ValueError("ccdf of an empty sample")
    values, counts = np.unique(data, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1]
    return list(zip(values.tolist(), (at_least / data.size).tolist()))


# ---------------------------------------------------------------- files


def write_edges(g: ReplyGraph, path: Union[str, Path]) -> None:
    """Tab-separated edge list, one edge per line, ids ascending."""
    a, b = g.edge_index_pairs()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, y in zip(g.nodes[a].tolist(), g.nodes[b].tolist()):
            fh.write(f"{x}\t{y}\n")


def read_edges(path: Union[str, Path]) -> ReplyGraph:
    if Path(path).stat().st_size == 0:
        return ReplyGraph.empty()
    data = np.loadtxt(path, dtype=np.uint64, ndmin=2, delimiter="\t")
    if data.size == 0:
        return ReplyGraph.empty()
    return ReplyGraph.from_edges(data[:, 0], data[:, 1])


def export_graph(g: ReplyGraph, path: Union[str, Path], fmt: str = "edge_csv") -> None:
    if fmt == "edge_csv":
        a, b = g.edge_index_pairs()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["source", "target"])
            w.writerows(zip(g.nodes[a].tolist(), g.nodes[b].tolist()))
    elif fmt == "gexf":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
            fh.write('<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">\n')
            fh.write('  <graph mode="static" defaultedgetype="undirected">\n')
            fh.write("    <nodes>\n")
            for node in g.nodes.tolist():
                fh.write(f'      <node id="{node}" label="{escape(str(node))}"/>\n')
            fh.write("    </nodes>\n    <edges>\n")
            a, b = g.edge_index_pairs()
            for i, (x, y) in enumerate(zip(g.nodes[a].tolist(), g.nodes[b].tolist())):
                fh.write(f'      <edge id="{i}" source="{x}" target="{y}"/>\n')
            fh.write("    </edges>\n  </graph>\n</gexf>\n")
    else:
        raise ValueError(f"unknown export format {fmt!r}")


def read_edge_csv(path: Union[str, Path]) -> ReplyGraph:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    body = rows[1:] if rows and rows[0] == ["source", "target"] else rows
    if not body:
        return ReplyGraph.empty()
    u = np.array([int(r[0]) for r in body], dtype=np.uint64)
    v = np.array([int(r[1]) for r in body], dtype=np.uint64)
    return ReplyGraph.from_edges(u, v)
