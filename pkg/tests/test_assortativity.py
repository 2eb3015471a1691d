from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import oracles
from hedonet.assortativity import (
    AssortativityError,
    ScoredPairSet,
    correlate,
    happiness_by_degree,
    null_from_pairs,
    null_model,
    scored_pairs,
    scored_pairs_multi,
)
from hedonet.graph import ReplyGraph
from hedonet.hedonometer import HappinessScore
from hedonet.synthetic import independent_scores, random_graph, smoothed_scores


def scores_of(values: dict, count: int = 100) -> dict:
    return {u: HappinessScore(u, 0, float(h), count) for u, h in values.items()}


def path3():
    return ReplyGraph.from_edges([1, 2], [2, 3])


def test_double_ordering_counts():
    ps = scored_pairs(path3(), scores_of({1: 5, 2: 6, 3: 7}), 1, 1)
    assert ps.n_pairs == 4
    assert sorted(map(tuple, ps.pairs.tolist())) == [(5, 6), (6, 5), (6, 7), (7, 6)]


def test_threshold_drops_pairs():
    sc = scores_of({1: 5, 3: 7}) | {2: HappinessScore(2, 0, 6.0, 3)}
    assert scored_pairs(path3(), sc, 1, alpha=10).n_pairs == 0
    assert scored_pairs(path3(), sc, 2, alpha=10).n_pairs == 2


@pytest.mark.parametrize("seed", range(3))
def test_pairs_match_floyd_warshall_filtered(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(250, 3.0, rng)
    counts = rng.integers(1, 100, g.n_nodes)
    sc = {int(u): HappinessScore(int(u), 0, float(rng.uniform(2, 8)), int(c)) for u, c in zip(g.nodes, counts)}
    keep = {u for u, s in sc.items() if s.labmt_word_count >= 40}
    sets = scored_pairs_multi(g, sc, [1, 2, 3], alpha=40)
    for d in (1, 2, 3):
        want = {p for p in oracles.pairs_at_distance(g.edge_set(), d) if p[0] in keep and p[1] in keep}
        ps = sets[d]
        got = set(zip(g.nodes[ps.u].tolist(), g.nodes[ps.v].tolist()))
        assert got == want and len(got) == ps.u.size
        assert ps.n_pairs % 2 == 0


def test_correlate_explicit_pairs():
    r = correlate(ScoredPairSet.from_values([1, 2, 3], [10, 20, 30]))
    assert r.r_spearman == 1.0 and r.r_pearson == pytest.approx(1.0)
    assert correlate(ScoredPairSet.from_values([1, 2, 3], [4, 4, 4])).r_spearman is None


def test_correlate_double_ordered_perfect():
    g = ReplyGraph.from_edges([1, 3, 5], [2, 4, 6])
    r = correlate(scored_pairs(g, scores_of({1: 4, 2: 4, 3: 6, 4: 6, 5: 8, 6: 8}), 1))
    assert r.r_spearman == pytest.approx(1.0)


def test_correlate_degenerate_cases():
    assert correlate(scored_pairs(path3(), scores_of({1: 5, 2: 5, 3: 5}), 1)).r_spearman is None
    single = correlate(scored_pairs(ReplyGraph.from_edges([1], [2]), scores_of({1: 4, 2: 8}), 1))
    assert single.r_spearman is None and single.n_pairs == 2


@pytest.mark.parametrize("seed", range(5))
def test_correlate_matches_rank_oracle(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(60, 1.7, rng)
    values = {int(u): float(np.round(rng.uniform(2, 8), 1)) for u in g.nodes}
    ps = scored_pairs(g, scores_of(values), 1)
    x, y = ps.pairs[:, 0], ps.pairs[:, 1]
    r = correlate(ps)
    assert r.r_spearman == pytest.approx(oracles.rank_then_pearson(x, y), abs=1e-12)
    assert r.r_spearman == pytest.approx(stats.spearmanr(x, y)[0], abs=1e-12)
    assert r.r_pearson == pytest.approx(stats.pearsonr(x, y)[0], abs=1e-12)


def test_correlate_50_explicit_pairs_oracle():
    rng = np.random.default_rng(50)
    x, y = np.round(rng.normal(size=50), 1), np.round(rng.normal(size=50), 1)
    r = correlate(ScoredPairSet.from_values(x, y))
    assert r.r_spearman == pytest.approx(oracles.rank_then_pearson(x, y), abs=1e-12)


def test_monotone_invariance_and_symmetry():
    rng = np.random.default_rng(3)
    g = random_graph(300, 4, rng)
    base = smoothed_scores(g, rng)
    warped = {u: HappinessScore(u, 0, float(np.exp(s.h)), s.labmt_word_count) for u, s in base.items()}
    for d in (1, 2, 3):
        a = correlate(scored_pairs(g, base, d)).r_spearman
        b = correlate(scored_pairs(g, warped, d)).r_spearman
        assert a == pytest.approx(b, abs=1e-12)
    ps = scored_pairs(g, base, 1)
    swapped = ScoredPairSet(1, 1, ps.v, ps.u, ps.values, ps.n_users_qualifying)
    assert correlate(swapped).r_spearman == pytest.approx(correlate(ps).r_spearman, abs=1e-14)
    n1 = null_model(g, base, 1, 1, 20, seed=4)
    n2 = null_model(g, warped, 1, 1, 20, seed=4)
    assert n1.observed_r == pytest.approx(n2.observed_r, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 60), st.integers(1, 60))
def test_alpha_monotone(seed, a1, a2):
    rng = np.random.default_rng(seed)
    g = random_graph(80, 3, rng)
    sc = {int(u): HappinessScore(int(u), 0, 5.0 + rng.random(), int(rng.integers(1, 60))) for u in g.nodes}
    lo, hi = sorted((a1, a2))
    for d in (1, 2, 3):
        assert scored_pairs(g, sc, d, hi).n_pairs <= scored_pairs(g, sc, d, lo).n_pairs


def test_null_model_matches_naive_permutation():
    from hedonet.parallel import replica_rng

    rng = np.random.default_rng(8)
    g = random_graph(120, 3, rng)
    sc = independent_scores(g, rng)
    sc = {u: HappinessScore(u, 0, s.h, 1 + (u % 7) * 10) for u, s in sc.items()}
    res = null_model(g, sc, d=2, alpha=20, n_perm=15, seed=42)
    qual = sorted(u for u, s in sc.items() if s.labmt_word_count >= 20)
    for i in range(15):
        perm = replica_rng(42, i).permutation(len(qual))
        moved = dict(sc)
        for j, u in enumerate(qual):
            src = sc[qual[perm[j]]]
            moved[u] = HappinessScore(u, 0, src.h, sc[u].labmt_word_count)
        naive = correlate(scored_pairs(g, moved, 2, 20)).r_spearman
        assert res.null_rs[i] == pytest.approx(naive, abs=1e-12)


def test_null_model_result_fields():
    rng = np.random.default_rng(1)
    g = random_graph(200, 4, rng)
    res = null_model(g, independent_scores(g, rng), 1, 1, 50, seed=7)
    assert len(res.null_rs) == 50 and 0 < res.empirical_p <= 1
    exceed = sum(abs(r) >= abs(res.observed_r) for r in res.null_rs)
    assert res.empirical_p == (exceed + 1) / 51
    assert res.null_mean == pytest.approx(np.mean(res.null_rs))
    assert res.to_dict()["n_permutations"] == 50


def test_null_model_degenerate_and_errors():
    g = random_graph(50, 3, np.random.default_rng(0))
    flat = scores_of({int(u): 6.0 for u in g.nodes})
    res = null_model(g, flat, 1, 1, 10, seed=0)
    assert res.degenerate and res.empirical_p is None
    with pytest.raises(AssortativityError):
        null_model(g, flat, 1, alpha=10**6, n_perm=5, seed=0)
    with pytest.raises(AssortativityError):
        null_model(g, flat, 1, 1, 0, seed=0)


def test_null_reproducible_across_workers():
    rng = np.random.default_rng(2)
    g = random_graph(300, 4, rng)
    sc = independent_scores(g, rng)
    ps = scored_pairs(g, sc, 1)
    a = null_from_pairs(ps, 45, seed=123, threads=1)
    b = null_from_pairs(ps, 45, seed=123, threads=3)
    assert a.null_rs == b.null_rs


def test_planted_beats_null_and_orders_by_distance():
    rng = np.random.default_rng(0)
    g = random_graph(3000, 4, rng)
    sc = smoothed_scores(g, rng)
    rs = [correlate(scored_pairs(g, sc, d)).r_spearman for d in (1, 2, 3)]
    assert rs[0] > rs[1] > rs[2] > 0
    res = null_model(g, sc, 1, 1, 50, seed=0)
    assert res.observed_r > res.null_mean + 3 * res.null_std


def test_star_degree_profile():
    star = ReplyGraph.from_edges([1] * 5, [2, 3, 4, 5, 6])
    sc = scores_of({1: 9, 2: 5, 3: 5, 4: 5, 5: 5, 6: 5})
    prof = happiness_by_degree(star, sc, [1, 5])
    assert prof[0] == {"k_lower": 1, "k_upper": 5, "mean_h": 5.0, "n_unique_users": 5}
    assert prof[1] == {"k_lower": 5, "k_upper": None, "mean_h": 9.0, "n_unique_users": 1}


def test_regular_graph_single_bin():
    ring = ReplyGraph.from_edges(list(range(1, 11)), [i % 10 + 1 for i in range(1, 11)])
    vals = {u: 3.0 + u / 10 for u in range(1, 11)}
    prof = happiness_by_degree(ring, scores_of(vals))
    populated = [p for p in prof if p["n_unique_users"]]
    assert len(populated) == 1 and populated[0]["mean_h"] == pytest.approx(np.mean(list(vals.values())))
    assert all(p["mean_h"] is None for p in prof if not p["n_unique_users"])


def test_degree_profile_matches_groupby():
    rng = np.random.default_rng(6)
    g = random_graph(500, 5, rng)
    sc = independent_scores(g, rng)
    edges = [1, 3, 5, 8, 13]
    prof = happiness_by_degree(g, sc, edges)
    deg = dict(zip(g.nodes.tolist(), g.degrees().tolist()))
    for i, row in enumerate(prof):
        hi = edges[i + 1] if i + 1 < len(edges) else np.inf
        members = [sc[u].h for u in deg if edges[i] <= deg[u] < hi]
        assert row["n_unique_users"] == len(members)
        if members:
            assert row["mean_h"] == pytest.approx(np.mean(members))


@pytest.mark.parametrize("edges", [[], [0, 1], [2, 2], [3, 1], [1.5, 2]])
def test_bad_bins(edges):
    with pytest.raises(AssortativityError):
        happiness_by_degree(path3(), scores_of({1: 5}), edges)
