"""Happiness correlation across exact-distance pairs, permutation nulls, degree profile."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from . import _corr
from .graph import ReplyGraph, distance_pair_blocks
from .hedonometer import HappinessScore
from .parallel import parallel_map, replica_rng

DEFAULT_ALPHA = 50
DEFAULT_PERMUTATIONS = 100
DEFAULT_BIN_EDGES = tuple(2**i for i in range(12))
_NULL_CHUNK = 20


class AssortativityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScoredPairSet:
    """Qualifying pairs at one distance.

    ``u`` and ``v`` index into ``values`` (one slot per graph node, NaN where
    the node has no qualifying score).  Graph-derived sets are symmetric: each
    stored pair is unordered and stands for both orderings.  Sets made with
    ``from_values`` are taken as given.
    """

    distance: int
    alpha: int
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    n_users_qualifying: int
    symmetric: bool = True

    @classmethod
    def from_values(cls, hu, hv, distance: int = 1, alpha: int = 1) -> "ScoredPairSet":
        """Explicit (h_u, h_v) pairs, used as the sample without reordering."""
        hu = np.asarray(hu, dtype=float)
        hv = np.asarray(hv, dtype=float)
        if hu.shape != hv.shape or hu.ndim != 1:
            raise AssortativityError("pair coordinates must be 1-d arrays of equal length")
        p = hu.size
        idx = np.arange(p)
        return cls(distance, alpha, idx, idx + p, np.r_[hu, hv], 2 * p, symmetric=False)

    @property
    def n_pairs(self) -> int:
        return (2 if self.symmetric else 1) * int(self.u.size)

    @property
    def pairs(self) -> np.ndarray:
        """(n_pairs, 2) array of (h_u, h_v); both orderings for symmetric sets."""
        hu, hv = self.values[self.u], self.values[self.v]
        if not self.symmetric:
            return np.column_stack([hu, hv])
        return np.column_stack([np.r_[hu, hv], np.r_[hv, hu]])


@dataclass(frozen=True, slots=True)
class CorrelationResult:
    r_spearman: float | None
    r_pearson: float | None
    n_pairs: int
    p_value_spearman: float | None

    @property
    def defined(self) -> bool:
        return self.r_spearman is not None

    def to_dict(self) -> dict:
        return {
            "r_spearman": self.r_spearman,
            "r_pearson": self.r_pearson,
            "n_pairs": self.n_pairs,
            "p_value_spearman": self.p_value_spearman,
        }


@dataclass(frozen=True)
class NullModelResult:
    observed_r: float | None
    null_rs: list
    null_mean: float | None
    null_std: float | None
    empirical_p: float | None
    seed: int
    distance: int = 1
    alpha: int = 1
    n_pairs: int = 0

    @property
    def degenerate(self) -> bool:
        return self.observed_r is None

    def to_dict(self) -> dict:
        return {
            "observed_r": self.observed_r,
            "null_rs": self.null_rs,
            "null_mean": self.null_mean,
            "null_std": self.null_std,
            "empirical_p": self.empirical_p,
            "seed": self.seed,
            "distance": self.distance,
            "alpha": self.alpha,
            "n_pairs": self.n_pairs,
            "n_permutations": len(self.null_rs),
            "degenerate": self.degenerate,
        }


def score_vector(g: ReplyGraph, scores: Mapping[int, HappinessScore], alpha: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Per-node score array (NaN if absent) and the mask of nodes meeting alpha."""
    if alpha < 1:
        raise AssortativityError("alpha must be >= 1")
    values = np.full(g.n_nodes, np.nan)
    mask = np.zeros(g.n_nodes, dtype=bool)
    for pos, node in enumerate(g.nodes.tolist()):
        s = scores.get(node)
        if s is not None and s.labmt_word_count >= alpha:
            values[pos] = s.h
            mask[pos] = True
    return values, mask


def scored_pairs_multi(
    g: ReplyGraph, scores: Mapping[int, HappinessScore], hops: Iterable[int], alpha: int = 1
) -> dict[int, ScoredPairSet]:
    """scored_pairs for several distances with one traversal."""
    hops = sorted(set(hops))
    if not hops or hops[0] < 1 or hops[-1] > 3:
        raise AssortativityError("hops must be within 1..3")
    values, mask = score_vector(g, scores, alpha)
    chunks: dict[int, tuple[list, list]] = {d: ([], []) for d in hops}
    for d, a, b in distance_pair_blocks(g, hops[-1], mask=mask):
        if d in chunks:
            chunks[d][0].append(a.astype(np.int32))
            chunks[d][1].append(b.astype(np.int32))
    q = int(mask.sum())
    out = {}
    for d, (us, vs) in chunks.items():
        u = np.concatenate(us) if us else np.empty(0, np.int32)
        v = np.concatenate(vs) if vs else np.empty(0, np.int32)
        out[d] = ScoredPairSet(d, alpha, u, v, values, q)
    return out


def scored_pairs(g: ReplyGraph, scores: Mapping[int, HappinessScore], d: int, alpha: int = 1) -> ScoredPairSet:
    return scored_pairs_multi(g, scores, [d], alpha)[d]


def _asymptotic_p(r: float | None, n: int) -> float | None:
    if r is None or n < 3:
        return None
    if abs(r) >= 1.0:
        return 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * stats.t.sf(abs(t), n - 2))


def correlate(pairs: ScoredPairSet) -> CorrelationResult:
    """Spearman (average-tie ranks) and Pearson over the double-ordered pairs.

    The informational p-value uses the number of unordered pairs as the
    sample size, since the second ordering adds no independent information.
    """
    if pairs.u.size < 2:
        return CorrelationResult(None, None, pairs.n_pairs, None)
    if not pairs.symmetric:
        rs, rp = _corr.plain_correlations(pairs.values[pairs.u], pairs.values[pairs.v])
        return CorrelationResult(rs, rp, pairs.n_pairs, _asymptotic_p(rs, pairs.n_pairs))
    values = np.nan_to_num(pairs.values)
    rs, rp = _corr.paired_correlations(values, pairs.u, pairs.v)
    return CorrelationResult(rs, rp, pairs.n_pairs, _asymptotic_p(rs, int(pairs.u.size)))


def _spearman_of(values: np.ndarray, u, v, weights, used) -> float | None:
    ranks = np.zeros(values.size)
    ranks[used] = _corr.weighted_average_ranks(values[used], weights[used])
    return _corr.paired_pearson(ranks, u, v, weights)


def _null_chunk(indices, *, values, qualifying, u, v, weights, used, seed):
    out = []
    permuted = values.copy()
    for i in indices:
        perm = replica_rng(seed, i).permutation(qualifying.size)
        permuted[qualifying] = values[qualifying[perm]]
        out.append(_spearman_of(permuted, u, v, weights, used))
    return out


def null_from_pairs(
    pairs: ScoredPairSet, n_perm: int = DEFAULT_PERMUTATIONS, seed: int = 0, threads: int | None = None
) -> NullModelResult:
    """Permutation null for an existing pair set.

    Scores are shuffled among the qualifying users only, so the pair topology
    is the same in every replica; replica i draws from stream (seed, i).
    """
    if n_perm < 1:
        raise AssortativityError("n_perm must be >= 1")
    if pairs.u.size == 0:
        raise AssortativityError(f"no qualifying pairs at distance {pairs.distance}")
    if not pairs.symmetric:
        raise AssortativityError("the permutation null needs a graph-derived pair set")
    values = np.nan_to_num(pairs.values)
    qualifying = np.flatnonzero(~np.isnan(pairs.values))
    weights = _corr.incidence(pairs.u, pairs.v, values.size)
    used = weights > 0
    observed = _spearman_of(values, pairs.u, pairs.v, weights, used) if pairs.u.size >= 2 else None
    if observed is None:
        return NullModelResult(None, [None] * n_perm, None, None, None, seed, pairs.distance, pairs.alpha, pairs.n_pairs)
    work = partial(
        _null_chunk, values=values, qualifying=qualifying, u=pairs.u, v=pairs.v, weights=weights, used=used, seed=seed
    )
    chunks = [range(s, min(s + _NULL_CHUNK, n_perm)) for s in range(0, n_perm, _NULL_CHUNK)]
    null = [r for part in parallel_map(work, chunks, threads) for r in part]
    arr = np.array([np.nan if r is None else r for r in null])
    finite = arr[np.isfinite(arr)]
    exceed = int(np.sum(np.abs(finite) >= abs(observed)))
    return NullModelResult(
        observed,
        null,
        float(finite.mean()) if finite.size else None,
        float(finite.std()) if finite.size else None,
        (exceed + 1) / (n_perm + 1),
        seed,
        pairs.distance,
        pairs.alpha,
        pairs.n_pairs,
    )


def null_model(
    g: ReplyGraph,
    scores: Mapping[int, HappinessScore],
    d: int = 1,
    alpha: int = 1,
    n_perm: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
    threads: int | None = None,
) -> NullModelResult:
    return null_from_pairs(scored_pairs(g, scores, d, alpha), n_perm, seed, threads)


def happiness_by_degree(
    g: ReplyGraph,
    scores: Mapping[int, HappinessScore],
    bin_edges: Sequence[int] = DEFAULT_BIN_EDGES,
    alpha: int = 1,
) -> list[dict]:
    """Mean score of scored nodes grouped by degree.

    Bin i covers [edges[i], edges[i+1]); the last bin is open-ended.
    Degrees below the first edge are not counted.
    """
    edges = np.asarray(bin_edges)
    if edges.size == 0 or edges[0] < 1 or np.any(np.diff(edges) <= 0) or not np.all(edges == np.round(edges)):
        raise AssortativityError("bin edges must be strictly increasing positive integers")
    values, mask = score_vector(g, scores, alpha)
    deg = g.degrees()[mask]
    h = values[mask]
    which = np.searchsorted(edges, deg, side="right") - 1
    ok = which >= 0
    n = np.bincount(which[ok], minlength=edges.size)
    total = np.bincount(which[ok], weights=h[ok], minlength=edges.size)
    out = []
    for i in range(edges.size):
        upper = int(edges[i + 1]) if i + 1 < edges.size else None
        out.append(
            {
                "k_lower": int(edges[i]),
                "k_upper": upper,
                "mean_h": float(total[i] / n[i]) if n[i] else None,
                "n_unique_users": int(n[i]),
            }
        )
    return out


def partition_by_degree(
    g: ReplyGraph, scores: Mapping[int, HappinessScore], threshold: int, alpha: int = 1
) -> tuple[list[int], list[int]]:
    """User ids of scored nodes with degree below / at-or-above ``threshold``."""
    values, mask = score_vector(g, scores, alpha)
    deg = g.degrees()
    nodes = g.nodes
    low = [int(nodes[i]) for i in np.flatnonzero(mask & (deg < threshold))]
    high = [int(nodes[i]) for i in np.flatnonzero(mask & (deg >= threshold))]
    return low, high
