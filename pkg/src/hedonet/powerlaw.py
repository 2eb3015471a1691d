"""Discrete power-law fitting of degree distributions.

Follows the Clauset-Shalizi-Newman recipe: for every candidate lower cutoff the
exponent is the maximum-likelihood estimate over the tail, the cutoff kept is
the one minimising the Kolmogorov-Smirnov distance, and goodness of fit comes
from a semiparametric bootstrap that re-runs the whole search per replica.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass
from functools import partial

import numpy as np

from ._zeta import hurwitz_zeta, hurwitz_zeta_grouped
from .parallel import parallel_map, replica_rng

log = logging.getLogger(__name__)

ALPHA_BOUNDS = (1.01, 6.0)
MIN_TAIL = 50
GRAD_TOL = 1e-8
_TABLE_SPAN = 1_000_000
_HEAD = 2048


class PowerLawError(ValueError):
    pass


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    k_min: int
    ks_distance: float
    n_tail: int
    n_total: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GofResult:
    p_value: float
    n_bootstrap: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _solve_alpha(kmin: np.ndarray, n_tail: np.ndarray, sum_log: np.ndarray) -> np.ndarray:
    """Vectorised MLE of the exponent for each (kmin, tail) candidate.

    Solves mean_model(ln k) = mean_data(ln k) by safeguarded Newton steps
    inside the bracket ALPHA_BOUNDS.
    """
    target = sum_log / n_tail
    lo = np.full(kmin.shape, ALPHA_BOUNDS[0])
    hi = np.full(kmin.shape, ALPHA_BOUNDS[1])

    def grad(a, sel=slice(None)):
        z, z1, z2 = hurwitz_zeta(a, kmin[sel], derivatives=True)
        mean_log = -z1 / z
        var_log = z2 / z - mean_log**2
        return mean_log - target[sel], -var_log

    g_lo, _ = grad(lo)
    g_hi, _ = grad(hi)
    # continuous approximation as the starting point
    guess = np.clip(1.0 + 1.0 / np.maximum(target - np.log(kmin - 0.5), 1e-12), lo, hi)
    alpha = np.where(g_lo <= 0, lo, np.where(g_hi >= 0, hi, guess))
    active = (g_lo > 0) & (g_hi < 0)
    for _ in range(200):
        if not active.any():
            break
        a = alpha[active]
        g, dg = grad(a, active)
        n = n_tail[active]
        done = np.abs(n * g) < GRAD_TOL
        l, h = lo[active], hi[active]
        l = np.where(g > 0, a, l)
        h = np.where(g < 0, a, h)
        step = a - g / dg
        bad = ~np.isfinite(step) | (step <= l) | (step >= h)
        step = np.where(bad, 0.5 * (l + h), step)
        done |= (h - l) < 1e-15 * h
        lo[active], hi[active] = l, h
        alpha[active] = np.where(done, a, step)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return alpha


def _candidate_table(values: np.ndarray, counts: np.ndarray, min_tail: int):
    """Per distinct value: tail size and tail log-sum; mask of valid cutoffs."""
    n_ge = np.cumsum(counts[::-1])[::-1]
    log_sum = np.cumsum((counts * np.log(values))[::-1])[::-1]
    # a cutoff needs at least two distinct values at or above it
    valid = np.arange(values.size) < values.size - 1
    capped = valid & (n_ge >= min_tail)
    if not capped.any():
        if valid.any():
            warnings.warn(
                f"no cutoff leaves {min_tail} tail observations; searching all cutoffs",
                RuntimeWarning,
                stacklevel=3,
            )
        capped = valid
    return n_ge, log_sum, capped


def _max_gap(values, counts, n_ge, cand, alphas, z_min, first, last) -> np.ndarray:
    """Largest CDF gap per candidate over distinct-value positions [first, last)."""
    sizes = last - first
    out = np.zeros(cand.size)
    keep = sizes > 0
    if not keep.any():
        return out
    sizes = sizes[keep]
    offsets = np.cumsum(sizes) - sizes
    owner = np.repeat(np.flatnonzero(keep), sizes)
    pos = np.arange(sizes.sum()) + np.repeat(first[keep] - offsets, sizes)
    u = values[pos].astype(float)
    zm = z_min[owner]
    surv_before = hurwitz_zeta_grouped(alphas, u, owner) / zm  # P(K >= u)
    surv_after = surv_before - np.exp(-alphas[owner] * np.log(u)) / zm  # P(K > u)
    n_tail = n_ge[cand][owner]
    below = n_tail - n_ge[pos]
    gap = np.maximum(
        np.abs(below / n_tail - (1.0 - surv_before)),
        np.abs((below + counts[pos]) / n_tail - (1.0 - surv_after)),
    )
    out[keep] = np.maximum.reduceat(gap, offsets)
    return out


def _ks_distances(values, counts, cand, alphas, n_ge, prune: bool = True, head: int = 32):
    """KS distance between tail empirical CDF and fitted CDF per candidate.

    With ``prune`` the first ``head`` points of every tail give a lower bound;
    candidates are then completed in order of that bound until the bound
    exceeds the best complete distance.  The minimiser is unchanged; pruned
    entries hold their lower bound.
    """
    m = values.size
    z_min = hurwitz_zeta(alphas, values[cand].astype(float))
    stop = np.full(cand.size, m)
    if not prune:
        return _max_gap(values, counts, n_ge, cand, alphas, z_min, cand, stop)
    split = np.minimum(cand + head, m)
    dist = _max_gap(values, counts, n_ge, cand, alphas, z_min, cand, split)
    best = np.inf
    order = np.argsort(dist, kind="stable")
    batch = 16
    for i in range(0, order.size, batch):
        idx = order[i : i + batch]
        idx = idx[dist[idx] < best]
        if idx.size == 0:
            break
        rest = _max_gap(values, counts, n_ge, cand[idx], alphas[idx], z_min[idx], split[idx], stop[idx])
        dist[idx] = np.maximum(dist[idx], rest)
        best = min(best, dist[idx].min())
    return dist


def _distinct_counts(data: np.ndarray):
    top = int(data.max())
    if top <= 4 * data.size + 1_000_000:
        counts = np.bincount(data)
        values = np.flatnonzero(counts)
        return values, counts[values]
    return np.unique(data, return_counts=True)


def fit_discrete_powerlaw(degrees, min_tail: int = MIN_TAIL) -> PowerLawFit:
    """Fit a discrete power law P(k) ~ k^-alpha for k >= k_min.

    >>> fit = fit_discrete_powerlaw(degrees)
    >>> fit.alpha, fit.k_min
    """
    data = np.asarray(degrees)
    if data.size == 0:
        raise PowerLawError("empty degree sample")
    if np.any(data < 1):
        raise PowerLawError("degrees must be positive integers")
    data = data.astype(np.int64)
    if data.size < MIN_TAIL:
        warnings.warn(f"only {data.size} observations; fit is unreliable", RuntimeWarning, stacklevel=2)
    values, counts = _distinct_counts(data)
    if values.size < 2:
        raise PowerLawError("all degrees are equal; no power law can be fitted")
    n_ge, log_sum, ok = _candidate_table(values, counts, min_tail)
    cand = np.flatnonzero(ok)
    kmins = values[cand].astype(float)
    alphas = _solve_alpha(kmins, n_ge[cand].astype(float), log_sum[cand])
    dists = _ks_distances(values, counts, cand, alphas, n_ge)
    best = int(np.argmin(dists))
    return PowerLawFit(
        alpha=float(alphas[best]),
        k_min=int(values[cand[best]]),
        ks_distance=float(dists[best]),
        n_tail=int(n_ge[cand[best]]),
        n_total=int(data.size),
    )


class DiscretePowerLawSampler:
    """Inverse-CDF sampler for P(k) = k^-alpha / zeta(alpha, k_min), k >= k_min.

    Exact over a tabulated range of one million integers; the remaining mass
    beyond the table uses the rounded continuous approximation.
    """

    def __init__(self, alpha: float, k_min: int, span: int = _TABLE_SPAN):
        self.alpha = float(alpha)
        self.k_min = int(k_min)
        ks = np.arange(self.k_min, self.k_min + span, dtype=float)
        z = hurwitz_zeta(self.alpha, float(self.k_min))
        pmf = np.exp(-self.alpha * np.log(ks)) / z
        self._cdf = np.cumsum(pmf)
        self._beyond = float(hurwitz_zeta(self.alpha, float(self.k_min + span)) / z)
        self._cdf *= (1.0 - self._beyond) / self._cdf[-1]
        self._top = self.k_min + span
        self._head = self._cdf[:_HEAD].copy()

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(size)
        # a short head table answers almost every draw and stays in cache
        pos = np.searchsorted(self._head, u, side="right")
        deep = pos == self._head.size
        if deep.any():
            pos[deep] = np.searchsorted(self._cdf, u[deep], side="right")
        out = self.k_min + pos.astype(np.int64)
        far = out >= self._top
        if far.any():
            v = rng.random(int(far.sum()))
            x = np.floor((self._top - 0.5) * (1.0 - v) ** (-1.0 / (self.alpha - 1.0)) + 0.5)
            out[far] = np.minimum(x, 2**62).astype(np.int64)
        return out


def _bootstrap_chunk(indices, *, sampler, body, n_total, n_tail, seed, min_tail):
    out = []
    for i in indices:
        rng = replica_rng(seed, i)
        n_from_tail = int(rng.binomial(n_total, n_tail / n_total))
        tail = sampler.sample(n_from_tail, rng)
        if body.size:
            head = body[rng.integers(0, body.size, n_total - n_from_tail)]
            sample = np.concatenate([head, tail])
        else:
            sample = tail
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                out.append(fit_discrete_powerlaw(sample, min_tail=min_tail).ks_distance)
        except PowerLawError:
            out.append(np.inf)
    return out


def gof_pvalue(
    fit: PowerLawFit,
    degrees,
    n_bootstrap: int = 1000,
    seed: int = 0,
    threads: int | None = None,
    min_tail: int = MIN_TAIL,
) -> GofResult:
    """Semiparametric bootstrap p-value for the KS distance of ``fit``."""
    if n_bootstrap < 1:
        raise PowerLawError("n_bootstrap must be positive")
    if n_bootstrap < 100:
        warnings.warn("fewer than 100 bootstrap replicas", RuntimeWarning, stacklevel=2)
    data = np.asarray(degrees).astype(np.int64)
    body = np.sort(data[data < fit.k_min])
    sampler = DiscretePowerLawSampler(fit.alpha, fit.k_min)
    work = partial(
        _bootstrap_chunk,
        sampler=sampler,
        body=body,
        n_total=data.size,
        n_tail=fit.n_tail,
        seed=seed,
        min_tail=min_tail,
    )
    chunks = [range(i, min(i + 25, n_bootstrap)) for i in range(0, n_bootstrap, 25)]
    dists = [d for part in parallel_map(work, chunks, threads) for d in part]
    hits = sum(1 for d in dists if d >= fit.ks_distance)
    log.debug("bootstrap: %d/%d replicas at least as far as observed", hits, n_bootstrap)
    return GofResult(p_value=hits / n_bootstrap, n_bootstrap=n_bootstrap, seed=seed)


def continuous_alpha_estimate(degrees, k_min: int) -> float:
    """Closed-form approximation 1 + n / sum(ln(k / (k_min - 1/2)))."""
    tail = np.asarray(degrees, dtype=float)
    tail = tail[tail >= k_min]
    return 1.0 + tail.size / np.sum(np.log(tail / (k_min - 0.5)))
