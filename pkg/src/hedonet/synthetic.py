"""Synthetic graphs, scores, bags and message streams for testing and benchmarks."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

from .graph import ReplyGraph
from .hedonometer import HappinessScore, WordBag
from .powerlaw import DiscretePowerLawSampler

_EPOCH_2008_09_09 = int(datetime(2008, 9, 9, tzinfo=timezone.utc).timestamp())


def power_law_degrees(n: int, alpha: float, k_min: int, rng: np.random.Generator, k_max: int | None = None) -> np.ndarray:
    """Discrete power-law draws; values above ``k_max`` are redrawn."""
    sampler = DiscretePowerLawSampler(alpha, k_min)
    out = sampler.sample(n, rng)
    if k_max is not None:
        bad = out > k_max
        while bad.any():
            out[bad] = sampler.sample(int(bad.sum()), rng)
            bad = out > k_max
    return out


def configuration_graph(degrees: Sequence[int], rng: np.random.Generator, first_id: int = 1) -> ReplyGraph:
    """Random stub matching; self-loops and multi-edges are discarded."""
    degrees = np.asarray(degrees, dtype=np.int64)
    stubs = np.repeat(np.arange(degrees.size, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    if stubs.size % 2:
        stubs = stubs[:-1]
    u, v = stubs[0::2], stubs[1::2]
    return ReplyGraph.from_edges(u + first_id, v + first_id)


def random_graph(n: int, mean_degree: float, rng: np.random.Generator, first_id: int = 1) -> ReplyGraph:
    """G(n, m) style graph with m = n * mean_degree / 2 random endpoint pairs."""
    m = int(round(n * mean_degree / 2))
    u = rng.integers(0, n, m)
    v = rng.integers(0, n, m)
    return ReplyGraph.from_edges(u + first_id, v + first_id)


def random_events(n_users: int, n_events: int, rng: np.random.Generator, reciprocity: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Directed reply events (src, dst) among ``n_users`` ids.

    A ``reciprocity`` share of events answer an earlier event in reverse, so the
    reciprocal graph is not empty; self-replies occur at random.
    """
    src = rng.integers(0, n_users, n_events)
    dst = rng.integers(0, n_users, n_events)
    back = rng.random(n_events) < reciprocity
    earlier = (rng.random(n_events) * np.arange(n_events)).astype(np.int64)
    src = np.where(back, dst[earlier], src)
    dst = np.where(back, src[earlier], dst)
    return src.astype(np.uint64) + 1, dst.astype(np.uint64) + 1


def independent_scores(g: ReplyGraph, rng: np.random.Generator, word_count: int = 100) -> dict[int, HappinessScore]:
    h = np.clip(rng.normal(6.0, 0.5, g.n_nodes), 1.0, 9.0)
    return {int(u): HappinessScore(int(u), 0, float(x), word_count) for u, x in zip(g.nodes, h)}


def smoothed_scores(
    g: ReplyGraph, rng: np.random.Generator, passes: int = 2, word_count: int = 100
) -> dict[int, HappinessScore]:
    """Scores correlated along edges.

    Random node values are repeatedly replaced by the mean over the closed
    neighbourhood, so nearby nodes share most of their sources.
    """
    x = rng.normal(0.0, 1.0, g.n_nodes)
    adj = g.adjacency().astype(float)
    size = g.degrees() + 1.0
    for _ in range(passes):
        x = (x + adj @ x) / size
    x = (x - x.mean()) / (x.std() or 1.0)
    h = np.clip(6.0 + 0.5 * x, 1.0, 9.0)
    return {int(u): HappinessScore(int(u), 0, float(v), word_count) for u, v in zip(g.nodes, h)}


def shared_vocabulary_bags(
    g: ReplyGraph, words: Sequence[str], rng: np.random.Generator, words_per_user: int = 60, share: float = 0.5
) -> dict[int, WordBag]:
    """Bags where each edge plants a private topic drawn by both endpoints.

    Every user mixes words from a background distribution with words from
    topics attached to their incident edges.
    """
    words = list(words)
    nw = len(words)
    a, b = g.edge_index_pairs()
    topic = rng.integers(0, nw, size=(a.size, 3))
    per_node: list[list[int]] = [[] for _ in range(g.n_nodes)]
    for e in range(a.size):
        per_node[a[e]].append(e)
        per_node[b[e]].append(e)
    bags = {}
    for pos, uid in enumerate(g.nodes.tolist()):
        n_topic = rng.binomial(words_per_user, share) if per_node[pos] else 0
        picks = list(rng.integers(0, nw, words_per_user - n_topic))
        if n_topic:
            es = rng.choice(per_node[pos], n_topic)
            picks += list(topic[es, rng.integers(0, 3, n_topic)])
        counts: dict[str, int] = {}
        for i in picks:
            counts[words[i]] = counts.get(words[i], 0) + 1
        bags[uid] = WordBag(uid, 0, counts)
    return bags


def message_stream(
    n_messages: int,
    n_users: int,
    words: Sequence[str],
    rng: np.random.Generator,
    *,
    alpha: float = 2.8,
    k_min: int = 2,
    reply_share: float = 0.5,
    words_per_message: int = 6,
    start: int = _EPOCH_2008_09_09,
    span_seconds: int = 7 * 86_400,
    chunk: int = 200_000,
) -> Iterator[dict]:
    """JSON-ready message dicts for a synthetic week of conversation.

    Users sit on a hidden power-law contact graph and post in proportion to
    their number of contacts; a reply goes to a random contact of the author,
    so reciprocal pairs arise where both sides talk.  Message ids increase
    with time.
    """
    deg = power_law_degrees(n_users, alpha, k_min, rng, k_max=max(k_min, n_users // 10))
    contacts = configuration_graph(deg, rng, first_id=0)
    users = contacts.nodes.astype(np.int64)
    indptr, indices = contacts.indptr, contacts.indices
    cdeg = np.diff(indptr)
    activity = np.cumsum(cdeg, dtype=np.float64)
    activity /= activity[-1]
    vocab = np.asarray(words)
    times = np.sort(rng.integers(start, start + span_seconds, n_messages))
    mid = 10_000_000
    for lo in range(0, n_messages, chunk):
        size = min(chunk, n_messages - lo)
        author = np.searchsorted(activity, rng.random(size), side="right")
        is_reply = rng.random(size) < reply_share
        pick = (rng.random(size) * cdeg[author]).astype(np.int64)
        target = indices[indptr[author] + pick]
        tokens = vocab[rng.integers(0, vocab.size, (size, words_per_message))]
        gaps = rng.integers(1, 4, size)
        for i in range(size):
            mid += int(gaps[i])
            rec = {
                "id": mid,
                "user_id": int(users[author[i]]) + 1,
                "text": " ".join(tokens[i]),
                "created_at": int(times[lo + i]),
            }
            if is_reply[i]:
                rec["in_reply_to_status_id"] = mid - int(gaps[i])
                rec["in_reply_to_user_id"] = int(users[target[i]]) + 1
            yield rec


def write_stream(path: Union[str, Path], records) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n
