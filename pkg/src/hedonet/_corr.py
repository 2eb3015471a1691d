"""Correlation over symmetric (double-ordered) node pairs.

For unordered pairs {u, v} the correlated samples are x = (h_u..., h_v...) and
y = (h_v..., h_u...).  Both coordinates hold the same multiset, in which node u
appears once per pair it belongs to, so ranks and moments can be taken per
node with incidence weights instead of materialising 2P values.
"""

from __future__ import annotations

import numpy as np


def incidence(u: np.ndarray, v: np.ndarray, n_nodes: int) -> np.ndarray:
    return np.bincount(u, minlength=n_nodes) + np.bincount(v, minlength=n_nodes)


def weighted_average_ranks(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """1-based average (fractional) rank of each value within the multiset
    where value i occurs weights[i] times."""
    order = np.argsort(values, kind="stable")
    sv = values[order]
    sw = weights[order].astype(float)
    uniq_start = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    group_w = np.add.reduceat(sw, uniq_start)
    before = np.cumsum(group_w) - group_w
    group_rank = before + (group_w + 1.0) / 2.0
    group_id = np.cumsum(np.r_[False, sv[1:] != sv[:-1]])
    ranks = np.empty_like(sw)
    ranks[order] = group_rank[group_id]
    return ranks


def paired_pearson(values: np.ndarray, u: np.ndarray, v: np.ndarray, weights: np.ndarray | None = None) -> float | None:
    """Pearson r of the double-ordered pair sample; None if degenerate."""
    if u.size == 0:
        return None
    if weights is None:
        weights = incidence(u, v, values.size)
    used = weights > 0
    if np.ptp(values[used]) == 0:
        return None
    values = np.where(used, values, 0.0)
    mean = np.dot(weights, values) / weights.sum()
    centred = values - mean
    var = np.dot(weights, centred * centred)
    cov = 2.0 * np.dot(centred[u], centred[v])
    return float(min(1.0, max(-1.0, cov / var)))


def paired_correlations(values: np.ndarray, u: np.ndarray, v: np.ndarray) -> tuple[float | None, float | None]:
    """(Spearman, Pearson) over the double-ordered pairs (values[u], values[v])."""
    if u.size == 0:
        return None, None
    weights = incidence(u, v, values.size)
    pearson = paired_pearson(values, u, v, weights)
    used = weights > 0
    ranks = np.zeros(values.size)
    ranks[used] = weighted_average_ranks(values[used], weights[used])
    spearman = paired_pearson(ranks, u, v, weights)
    return spearman, pearson


def average_ranks(x: np.ndarray) -> np.ndarray:
    return weighted_average_ranks(x, np.ones(x.size))


def plain_correlations(x: np.ndarray, y: np.ndarray) -> tuple[float | None, float | None]:
    """(Spearman, Pearson) of ordinary paired samples; None when degenerate."""

    def pearson(a, b):
        if a.size < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
            return None
        a = a - a.mean()
        b = b - b.mean()
        r = np.dot(a, b) / np.sqrt(np.dot(a, a) * np.dot(b, b))
        return float(min(1.0, max(-1.0, r)))

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return pearson(average_ranks(x), average_ranks(y)), pearson(x, y)
