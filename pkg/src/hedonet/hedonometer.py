"""Per-user word bags, hedonometer scores, word shifts and bag similarity."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .graph import ReplyGraph
from .lexicon import Lexicon, tokenize
from .parallel import parallel_map, replica_rng

log = logging.getLogger(__name__)


class HedonometerError(ValueError):
    pass


@dataclass(frozen=True)
class WordBag:
    user_id: int
    window_index: int
    counts: dict[str, int] = field(hash=False)

    @property
    def total_count(self) -> int:
        return sum(self.counts.values())

    def frequencies(self) -> dict[str, float]:
        total = self.total_count
        return {w: c / total for w, c in self.counts.items()}


@dataclass(frozen=True, slots=True)
class HappinessScore:
    user_id: int
    window_index: int
    h: float
    labmt_word_count: int


class SignClass(str, Enum):
    POS_UP = "pos_up"
    POS_DOWN = "pos_down"
    NEG_UP = "neg_up"
    NEG_DOWN = "neg_down"


@dataclass(frozen=True, slots=True)
class WordShiftEntry:
    word: str
    contribution: float
    sign_class: SignClass
    h_avg: float
    p_ref: float
    p_comp: float


def count_lexicon_words(texts: Iterable[str], lex: Lexicon) -> Counter:
    scores = lex.scores
    counts: Counter = Counter()
    for text in texts:
        counts.update(t for t in tokenize(text) if t in scores)
    return counts


def build_word_bags(texts: Mapping[int, Iterable[str]], lex: Lexicon, window_index: int = 0) -> dict[int, WordBag]:
    """Lexicon-word counts over every message each user wrote in the window.

    Users without a single lexicon match get no bag.
    """
    bags = {}
    for user, messages in texts.items():
        counts = count_lexicon_words(messages, lex)
        if counts:
            bags[user] = WordBag(user, window_index, dict(counts))
    return bags


def bags_from_lines(lines: Iterable[tuple[int, str]], lex: Lexicon, window_index: int = 0) -> dict[int, WordBag]:
    """Same as build_word_bags for a (user_id, text) stream, one message per item."""
    scores = lex.scores
    per_user: dict[int, Counter] = {}
    for user, text in lines:
        hits = [t for t in tokenize(text) if t in scores]
        if not hits:
            continue
        c = per_user.get(user)
        if c is None:
            c = per_user[user] = Counter()
        c.update(hits)
    return {u: WordBag(u, window_index, dict(c)) for u, c in per_user.items()}


def text_happiness(counts: Mapping[str, int], lex: Lexicon) -> float:
    """Frequency-weighted mean of word happiness over lexicon words in ``counts``."""
    scores = lex.scores
    num = 0.0
    den = 0
    for w, f in counts.items():
        h = scores.get(w)
        if h is not None:
            num += h * f
            den += f
    if den == 0:
        raise HedonometerError("no lexicon words to score")
    return num / den


def happiness(bag: WordBag, lex: Lexicon) -> HappinessScore:
    total = sum(f for w, f in bag.counts.items() if w in lex.scores)
    if total < 1:
        raise HedonometerError(f"user {bag.user_id} has an empty word bag")
    return HappinessScore(bag.user_id, bag.window_index, text_happiness(bag.counts, lex), total)


def score_bags(bags: Mapping[int, WordBag], lex: Lexicon) -> dict[int, HappinessScore]:
    out = {}
    for user, bag in bags.items():
        try:
            out[user] = happiness(bag, lex)
        except HedonometerError:
            continue
    return out


def aggregate(bags: Iterable[WordBag | Mapping[str, int]]) -> Counter:
    total: Counter = Counter()
    for bag in bags:
        total.update(bag.counts if isinstance(bag, WordBag) else bag)
    return total


def _as_counts(bag) -> Mapping[str, int]:
    return bag.counts if isinstance(bag, WordBag) else bag


def word_shift(ref_bag, comp_bag, lex: Lexicon, exclude: Iterable[str] = ()) -> list[WordShiftEntry]:
    """Per-word contributions to h(comp) - h(ref), largest magnitude first.

    contribution(w) = (h(w) - h(ref)) * (p_comp(w) - p_ref(w)); the entries
    sum to the score difference.
    """
    skip = set(exclude)
    scores = lex.scores
    ref = {w: f for w, f in _as_counts(ref_bag).items() if w in scores and w not in skip}
    comp = {w: f for w, f in _as_counts(comp_bag).items() if w in scores and w not in skip}
    n_ref, n_comp = sum(ref.values()), sum(comp.values())
    if n_ref == 0 or n_comp == 0:
        raise HedonometerError("word shift needs two non-empty bags")
    h_ref = sum(scores[w] * f for w, f in ref.items()) / n_ref
    entries = []
    for w in sorted(set(ref) | set(comp)):
        p_r = ref.get(w, 0) / n_ref
        p_c = comp.get(w, 0) / n_comp
        dh = scores[w] - h_ref
        dp = p_c - p_r
        if dh >= 0:
            cls = SignClass.POS_UP if dp >= 0 else SignClass.POS_DOWN
        else:
            cls = SignClass.NEG_UP if dp >= 0 else SignClass.NEG_DOWN
        entries.append(WordShiftEntry(w, dh * dp, cls, scores[w], p_r, p_c))
    entries.sort(key=lambda e: (-abs(e.contribution), e.word))
    return entries


def word_shift_summary(ref_bag, comp_bag, lex: Lexicon, entries: list[WordShiftEntry]) -> dict:
    """Totals behind a word-shift plot: text sizes, positive/negative mass, running sum."""
    scores = lex.scores
    words = {e.word for e in entries}
    ref = {w: f for w, f in _as_counts(ref_bag).items() if w in words}
    comp = {w: f for w, f in _as_counts(comp_bag).items() if w in words}
    n_ref, n_comp = sum(ref.values()), sum(comp.values())
    h_ref = sum(scores[w] * f for w, f in ref.items()) / n_ref
    h_comp = sum(scores[w] * f for w, f in comp.items()) / n_comp

    def mass(bag, n, positive):
        return sum(f for w, f in bag.items() if (scores[w] > h_ref) == positive and scores[w] != h_ref) / n

    by_class = Counter()
    for e in entries:
        by_class[e.sign_class.value] += e.contribution
    running = np.cumsum([e.contribution for e in entries]).tolist()
    return {
        "h_ref": h_ref,
        "h_comp": h_comp,
        "difference": h_comp - h_ref,
        "n_words_ref": n_ref,
        "n_words_comp": n_comp,
        "positive_mass_ref": mass(ref, n_ref, True),
        "negative_mass_ref": mass(ref, n_ref, False),
        "positive_mass_comp": mass(comp, n_comp, True),
        "negative_mass_comp": mass(comp, n_comp, False),
        "contribution_by_class": {k: by_class.get(k, 0.0) for k in (c.value for c in SignClass)},
        "cumulative_contribution": running,
    }


def bag_similarity(bag_i, bag_j, lex: Lexicon | None = None) -> float:
    """1 - (1/2) * L1 distance between normalised lexicon-word frequencies."""
    ci, cj = _as_counts(bag_i), _as_counts(bag_j)
    if lex is not None:
        ci = {w: f for w, f in ci.items() if w in lex.scores}
        cj = {w: f for w, f in cj.items() if w in lex.scores}
    ni, nj = sum(ci.values()), sum(cj.values())
    if ni == 0 or nj == 0:
        raise HedonometerError("similarity needs two non-empty bags")
    l1 = sum(abs(ci.get(w, 0) / ni - cj.get(w, 0) / nj) for w in set(ci) | set(cj))
    return min(1.0, max(0.0, 1.0 - 0.5 * l1))


@dataclass(frozen=True)
class SimilarityNullResult:
    observed_mean: float
    null_means: list[float]
    n_edges: int
    n_users: int
    seed: int
    observed: np.ndarray = field(repr=False, compare=False)

    @property
    def null_mean(self) -> float:
        return float(np.mean(self.null_means))

    def to_dict(self) -> dict:
        return {
            "observed_mean": self.observed_mean,
            "null_means": self.null_means,
            "null_mean": self.null_mean,
            "null_std": float(np.std(self.null_means)),
            "n_edges": self.n_edges,
            "n_users": self.n_users,
            "seed": self.seed,
        }


def _frequency_matrix(users: list[int], bags: Mapping[int, WordBag]) -> sp.csr_matrix:
    vocab: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for r, u in enumerate(users):
        counts = bags[u].counts
        total = sum(counts.values())
        for w, f in counts.items():
            rows.append(r)
            cols.append(vocab.setdefault(w, len(vocab)))
            vals.append(f / total)
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(users), max(1, len(vocab))))


def _edge_similarity(freq: sp.csr_matrix, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # for probability vectors 1 - |p - q|_1 / 2 equals sum(min(p, q))
    out = np.asarray(freq[a].minimum(freq[b]).sum(axis=1)).ravel()
    return np.clip(out, 0.0, 1.0)


def _similarity_replica(i, *, freq, a, b, n_users, seed):
    perm = replica_rng(seed, i).permutation(n_users)
    return float(_edge_similarity(freq, perm[a], perm[b]).mean())


def similarity_null(
    g: ReplyGraph,
    bags: Mapping[int, WordBag],
    n_perm: int = 100,
    seed: int = 0,
    alpha: int | None = None,
    threads: int | None = None,
) -> SimilarityNullResult:
    """Mean edge similarity against bags shuffled among users, topology fixed."""
    if n_perm < 1:
        raise HedonometerError("n_perm must be >= 1")
    holders = []
    for pos, node in enumerate(g.nodes.tolist()):
        bag = bags.get(node)
        if bag is not None and bag.total_count >= max(1, alpha or 1):
            holders.append(pos)
    if not holders:
        raise HedonometerError("no qualifying edges")
    slot = np.full(g.n_nodes, -1)
    slot[holders] = np.arange(len(holders))
    ea, eb = g.edge_index_pairs()
    keep = (slot[ea] >= 0) & (slot[eb] >= 0)
    a, b = slot[ea[keep]], slot[eb[keep]]
    if a.size == 0:
        raise HedonometerError("no qualifying edges")
    users = [int(g.nodes[p]) for p in holders]
    freq = _frequency_matrix(users, bags)
    observed = _edge_similarity(freq, a, b)
    work = partial(_similarity_replica, freq=freq, a=a, b=b, n_users=len(users), seed=seed)
    null_means = parallel_map(work, range(n_perm), threads)
    return SimilarityNullResult(float(observed.mean()), null_means, int(a.size), len(users), seed, observed)
