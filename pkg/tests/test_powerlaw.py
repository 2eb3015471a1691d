from __future__ import annotations

import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize, special

from hedonet._zeta import hurwitz_zeta, hurwitz_zeta_grouped
from hedonet.powerlaw import (
    ALPHA_BOUNDS,
    DiscretePowerLawSampler,
    PowerLawError,
    continuous_alpha_estimate,
    fit_discrete_powerlaw,
    gof_pvalue,
)


def _mp_zeta(s, q, order=0):
    with mpmath.workdps(40):
        return float(mpmath.zeta(s, q, order))


def ks_at(data, a, k):
    tail = np.asarray(data)[np.asarray(data) >= k]
    n = tail.size
    z = special.zeta(a, k)
    uv, cnt = np.unique(tail, return_counts=True)
    ecdf_hi = np.cumsum(cnt) / n
    ecdf_lo = ecdf_hi - cnt / n
    cdf_hi = 1.0 - special.zeta(a, uv + 1) / z
    cdf_lo = 1.0 - special.zeta(a, uv) / z
    return max(np.max(np.abs(ecdf_hi - cdf_hi)), np.max(np.abs(ecdf_lo - cdf_lo)))


def brute_fit(data, min_tail=50):
    """Exhaustive fit: scipy Hurwitz zeta, bounded scalar MLE, full KS per cutoff."""
    data = np.asarray(data, dtype=np.int64)
    values = np.unique(data)
    best = None
    cands = [k for k in values[:-1] if np.sum(data >= k) >= min_tail]
    for k in cands:
        tail = data[data >= k]
        n, sl = tail.size, np.log(tail).sum()

        def nll(a):
            return n * np.log(special.zeta(a, k)) + a * sl

        res = optimize.minimize_scalar(nll, bounds=ALPHA_BOUNDS, method="bounded", options={"xatol": 1e-10})
        a = res.x
        dist = ks_at(data, a, k)
        if best is None or dist < best[2]:
            best = (a, int(k), dist)
    return best


# -- zeta -----------------------------------------------------------------


@pytest.mark.parametrize("s", [1.01, 1.5, 2.0, 2.5, 3.5, 6.0])
@pytest.mark.parametrize("q", [1.0, 2.0, 7.0, 34.0, 1000.0, 1e6])
def test_hurwitz_zeta_matches_mpmath(s, q):
    v, d1, d2 = hurwitz_zeta(s, q, derivatives=True)
    assert float(v) == pytest.approx(_mp_zeta(s, q), rel=1e-12)
    assert float(d1) == pytest.approx(_mp_zeta(s, q, 1), rel=1e-10)
    assert float(d2) == pytest.approx(_mp_zeta(s, q, 2), rel=1e-10)


def test_hurwitz_zeta_vectorised_and_grouped():
    s = np.array([2.0, 3.0, 3.5])
    q = np.array([1.0, 5.0, 40.0])
    z = hurwitz_zeta(s, q)
    assert np.allclose(z, special.zeta(s, q), rtol=1e-12)
    grouped = hurwitz_zeta_grouped(s, np.array([2.0, 3.0, 50.0, 60.0]), np.array([0, 0, 2, 2]))
    expected = special.zeta(np.array([2.0, 2.0, 3.5, 3.5]), [2.0, 3.0, 50.0, 60.0])
    assert np.allclose(grouped, expected, rtol=1e-12)


# -- fit ------------------------------------------------------------------


def test_recovers_planted_parameters():
    rng = np.random.default_rng(7)
    body = rng.integers(1, 34, 30_000)
    tail = DiscretePowerLawSampler(3.5, 34).sample(20_000, rng)
    fit = fit_discrete_powerlaw(np.r_[body, tail])
    assert 3.4 <= fit.alpha <= 3.6
    assert 17 <= fit.k_min <= 68
    assert fit.n_total == 50_000


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fit_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    data = np.r_[rng.integers(1, 6, 300), DiscretePowerLawSampler(2.7, 6).sample(700, rng)]
    fit = fit_discrete_powerlaw(data)
    a, k, dist = brute_fit(data)
    assert fit.k_min == k
    assert fit.alpha == pytest.approx(a, abs=1e-6)
    # the bounded search is only good to ~1e-7 in alpha; compare D at our alpha exactly
    assert fit.ks_distance == pytest.approx(dist, abs=1e-6)
    assert fit.ks_distance == pytest.approx(ks_at(data, fit.alpha, fit.k_min), abs=1e-12)


def test_empty_and_constant_samples_raise():
    with pytest.raises(PowerLawError):
        fit_discrete_powerlaw([])
    with pytest.raises(PowerLawError):
        fit_discrete_powerlaw([4] * 100)
    with pytest.raises(PowerLawError):
        fit_discrete_powerlaw([0, 1, 2] * 40)


def test_small_sample_warns():
    with pytest.warns(RuntimeWarning):
        fit_discrete_powerlaw([1, 2, 2, 3, 5, 8, 13])


def test_ks_distance_shrinks_with_sample_size():
    dists = []
    for n in (500, 5_000, 50_000):
        runs = [
            fit_discrete_powerlaw(DiscretePowerLawSampler(2.5, 3).sample(n, np.random.default_rng(s))).ks_distance
            for s in range(5)
        ]
        dists.append(np.median(runs))
    assert dists[0] > dists[1] > dists[2]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), reps=st.integers(2, 4))
def test_duplicating_sample_keeps_fit(seed, reps):
    data = DiscretePowerLawSampler(2.8, 2).sample(200, np.random.default_rng(seed))
    if np.unique(data).size < 2:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        one = fit_discrete_powerlaw(data, min_tail=10)
        many = fit_discrete_powerlaw(np.tile(data, reps), min_tail=10)
    assert many.k_min == one.k_min
    assert many.alpha == pytest.approx(one.alpha, abs=1e-8)
    assert many.ks_distance == pytest.approx(one.ks_distance, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fit_result_invariants(seed):
    rng = np.random.default_rng(seed)
    data = DiscretePowerLawSampler(rng.uniform(2.0, 4.0), int(rng.integers(1, 10))).sample(400, rng)
    if np.unique(data).size < 2:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fit = fit_discrete_powerlaw(data)
    assert ALPHA_BOUNDS[0] <= fit.alpha <= ALPHA_BOUNDS[1]
    assert 0.0 <= fit.ks_distance <= 1.0
    assert fit.n_tail == int(np.sum(data >= fit.k_min))
    assert fit.k_min in set(data.tolist())


def test_continuous_estimate_close_to_mle():
    data = DiscretePowerLawSampler(3.0, 20).sample(100_000, np.random.default_rng(3))
    fit = fit_discrete_powerlaw(data)
    assert abs(continuous_alpha_estimate(data, fit.k_min) - fit.alpha) < 0.05


# -- sampler --------------------------------------------------------------


def test_sampler_pmf():
    alpha, k_min = 2.5, 3
    draws = DiscretePowerLawSampler(alpha, k_min).sample(400_000, np.random.default_rng(11))
    assert draws.min() >= k_min
    z = special.zeta(alpha, k_min)
    for k in (3, 4, 5, 10):
        expected = k**-alpha / z
        assert np.mean(draws == k) == pytest.approx(expected, abs=4 * np.sqrt(expected / draws.size))
    tail = special.zeta(alpha, 1000) / z
    assert np.mean(draws >= 1000) == pytest.approx(tail, abs=5 * np.sqrt(tail / draws.size))


def test_sampler_beyond_table():
    s = DiscretePowerLawSampler(1.5, 1, span=100)
    draws = s.sample(200_000, np.random.default_rng(5))
    p = special.zeta(1.5, 101) / special.zeta(1.5, 1)
    assert np.mean(draws > 100) == pytest.approx(p, rel=0.05)


# -- goodness of fit ------------------------------------------------------


def test_gof_deterministic_and_thread_independent():
    data = DiscretePowerLawSampler(2.5, 2).sample(2000, np.random.default_rng(0))
    fit = fit_discrete_powerlaw(data)
    a = gof_pvalue(fit, data, n_bootstrap=100, seed=42, threads=1)
    b = gof_pvalue(fit, data, n_bootstrap=100, seed=42, threads=2)
    assert a == b
    assert 0.0 <= a.p_value <= 1.0
    assert a.p_value > 0.05


def test_gof_rejects_exponential():
    data = 1 + np.random.default_rng(1).geometric(0.1, 5000)
    fit = fit_discrete_powerlaw(data)
    assert gof_pvalue(fit, data, n_bootstrap=100, seed=1, threads=1).p_value < 0.05


def test_gof_parameter_errors():
    data = DiscretePowerLawSampler(2.5, 2).sample(500, np.random.default_rng(0))
    fit = fit_discrete_powerlaw(data)
    with pytest.raises(PowerLawError):
        gof_pvalue(fit, data, n_bootstrap=0)
    with pytest.warns(RuntimeWarning):
        gof_pvalue(fit, data, n_bootstrap=10, seed=0, threads=1)
