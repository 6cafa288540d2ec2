"""Balls-into-bins computations: plain, binomially thrown and capacitated.

Exact solvers are dynamic programmes over bins or balls. Float versions
rescale after every step and carry the log of the scale, so masses of order
e^{-n} at n in the hundreds do not underflow.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

from .errors import BudgetError, DomainError
from .formula import RateParams
from .rates import f_rate

DP_BUDGET = 10 ** 7


# -- plain occupancy -------------------------------------------------------

def empty_bins_exact(n_bins: int, n_balls: int, exact: bool = False):
    """pmf of the number of empty bins after n_balls uniform throws.

    Runs the chain on the occupied count: a ball lands in a new bin with
    probability (n_bins - occupied) / n_bins. Index e of the result is
    Pr[B_0 = e]. With ``exact`` the entries are Fractions.
    """
    if n_bins < 1 or n_balls < 0:
        raise DomainError("need n_bins >= 1 and n_balls >= 0")
    if n_bins * max(n_balls, 1) > DP_BUDGET:
        raise BudgetError(f"{n_bins} x {n_balls} exceeds the DP budget of {DP_BUDGET}")
    if exact:
        occ = [Fraction(0)] * (n_bins + 1)
        occ[0] = Fraction(1)
        for _ in range(n_balls):
            new = [Fraction(0)] * (n_bins + 1)
            for o, p in enumerate(occ):
                if p:
                    new[o] += p * Fraction(o, n_bins)
                    if o < n_bins:
                        new[o + 1] += p * Fraction(n_bins - o, n_bins)
            occ = new
        return occ[::-1]
    occ = np.zeros(n_bins + 1)
    occ[0] = 1.0
    stay = np.arange(n_bins + 1) / n_bins
    move = 1.0 - stay
    for _ in range(n_balls):
        new = occ * stay
        new[1:] += occ[:-1] * move[:-1]
        occ = new
    return occ[::-1].copy()


@dataclass(frozen=True)
class BinomialApprox:
    target: int
    rounded_from: float
    log_prob: float
    per_n: float
    f_beta: float


def empty_bins_binapprox(n: float, params: RateParams, beta: float) -> BinomialApprox:
    """ln Pr[Bin(n, e^-lambda) = (1-beta) e^-lambda n] at the rounded target, and f(beta)."""
    q = math.exp(-params.lam)
    raw = (1 - beta) * q * n
    target = int(round(raw))
    if not 0 <= target <= n:
        raise DomainError(f"target {target} outside [0, {n}]")
    lp = float(binom.logpmf(target, n, q))
    return BinomialApprox(target, raw, lp, lp / n, f_rate(params, beta))


# -- capacitated model -----------------------------------------------------

@dataclass(frozen=True)
class OccupancyModel:
    """Independent bins conditioned on their total.

    A bin with finite capacity c holds Bin(c, per_slot_prob) balls; a bin
    with capacity ``math.inf`` holds Poisson(poisson_mean) balls. The event
    of interest also requires every load to be at most ``hard_cap``.
    """

    capacities: tuple[float, ...]
    hard_cap: float
    per_slot_prob: float
    total: int
    poisson_mean: float = 1.0

    def __post_init__(self):
        if any(c < 0 for c in self.capacities):
            raise DomainError("capacities must be non-negative")
        if not 0 <= self.per_slot_prob <= 1:
            raise DomainError("per_slot_prob must lie in [0, 1]")
        if self.total < 0:
            raise DomainError("total must be non-negative")

    @property
    def n_bins(self) -> int:
        return len(self.capacities)

    @classmethod
    def from_degrees(cls, degrees, params: RateParams, n: int | None = None) -> "OccupancyModel":
        """Bins hold min(3k, d_x) balls, slots fill with probability lambda/(kr),
        and the total is lambda n rounded to the nearest integer."""
        d = [int(x) for x in degrees]
        n = len(d) if n is None else n
        return cls(tuple(d), 3 * params.k, params.lam / (params.k * params.r), int(round(params.lam * n)))


def _bin_weights(model: OccupancyModel, cap: float, upper: int) -> np.ndarray:
    """Log pmf of one bin's load on 0..upper (unnormalised beyond upper)."""
    j = np.arange(upper + 1)
    if math.isinf(cap):
        mu = model.poisson_mean
        return j * math.log(mu) - mu - gammaln(j + 1)
    c = int(cap)
    j = j[j <= c]
    p = model.per_slot_prob
    with np.errstate(divide="ignore"):
        lp = binom.logpmf(j, c, p)
    return lp


@dataclass(frozen=True)
class ConditionedProb:
    log_prob: float
    feasible: bool
    log_numerator: float
    log_denominator: float

    @property
    def prob(self) -> float:
        return math.exp(self.log_prob) if self.feasible else 0.0


def _check_budget(model: OccupancyModel, target: int):
    size = model.n_bins * (model.total + 1) * (target + 1)
    if size > DP_BUDGET * 10:
        raise BudgetError(f"capacitated DP needs about {size} cell updates")


def capacitated_conditioned_prob(model: OccupancyModel, target_empty: int,
                                 params: RateParams | None = None) -> ConditionedProb:
    """Pr[X_0 = target_empty and every load <= hard_cap | T = total].

    ``params`` is accepted for call-site symmetry; the model already carries
    the slot probability.
    """
    T = model.total
    if target_empty < 0 or target_empty > model.n_bins:
        return ConditionedProb(-math.inf, False, -math.inf, 0.0)
    _check_budget(model, target_empty)
    # numerator: state[b, e] = scaled mass of (balls b, empties e)
    state = np.zeros((T + 1, target_empty + 1))
    state[0, 0] = 1.0
    log_scale = 0.0
    den = np.zeros(T + 1)
    den[0] = 1.0
    den_scale = 0.0
    for cap in model.capacities:
        upper = int(min(cap, model.hard_cap, T))
        lw = _bin_weights(model, cap, upper)
        w = np.exp(lw)
        new = np.zeros_like(state)
        # load 0 makes the bin empty
        if w.size:
            new[:, 1:] += w[0] * state[:, :-1]
        for j in range(1, w.size):
            new[j:, :] += w[j] * state[:-j, :]
        top = new.max()
        if top == 0:
            return ConditionedProb(-math.inf, False, -math.inf, 0.0)
        state = new / top
        log_scale += math.log(top)
        # denominator ignores the hard cap
        dupper = int(min(cap, T))
        dw = np.exp(_bin_weights(model, cap, dupper))
        dnew = np.zeros_like(den)
        for j in range(dw.size):
            if j == 0:
                dnew += dw[0] * den
            else:
                dnew[j:] += dw[j] * den[:-j]
        dtop = dnew.max()
        den = dnew / dtop
        den_scale += math.log(dtop)
    num_mass = state[T, target_empty]
    den_mass = den[T]
    if den_mass == 0:
        raise DomainError("total is unreachable: Pr[T = total] = 0")
    log_den = den_scale + math.log(den_mass)
    if num_mass == 0:
        return ConditionedProb(-math.inf, False, -math.inf, log_den)
    log_num = log_scale + math.log(num_mass)
    return ConditionedProb(log_num - log_den, True, log_num, log_den)


def capacitated_conditioned_prob_exact(model: OccupancyModel, target_empty: int) -> Fraction:
    """Rational version for small cases; Poisson bins use weights mu^j / j!.

    The e^{-mu} factors cancel between numerator and denominator, so a
    rational ``poisson_mean`` gives an exact answer.
    """
    T = model.total
    p = Fraction(model.per_slot_prob).limit_denominator(10 ** 12)
    mu = Fraction(model.poisson_mean).limit_denominator(10 ** 12)

    def weights(cap, upper):
        if math.isinf(cap):
            return [mu ** j / math.factorial(j) for j in range(upper + 1)]
        c = int(cap)
        return [math.comb(c, j) * p ** j * (1 - p) ** (c - j) for j in range(min(c, upper) + 1)]

    num = {(0, 0): Fraction(1)}
    den = {0: Fraction(1)}
    for cap in model.capacities:
        w = weights(cap, int(min(cap, model.hard_cap, T)))
        nxt: dict = {}
        for (b, e), mass in num.items():
            for j, wj in enumerate(w):
                if b + j > T:
                    break
                key = (b + j, e + (j == 0))
                nxt[key] = nxt.get(key, 0) + mass * wj
        num = nxt
        dw = weights(cap, int(min(cap, T)))
        dn: dict = {}
        for b, mass in den.items():
            for j, wj in enumerate(dw):
                if b + j > T:
                    break
                dn[b + j] = dn.get(b + j, 0) + mass * wj
        den = dn
    return Fraction(num.get((T, target_empty), 0)) / den[T]


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class ThrowStats:
    trials: int
    empty_pmf: dict[int, float]
    empty_ci: dict[int, tuple[float, float]]
    max_load_pmf: dict[int, float]
    within_hard_cap: float


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return (max(0.0, centre - half), min(1.0, centre + half))


def capacitated_throw_mc(model: OccupancyModel, trials: int, seed: int) -> ThrowStats:
    """Balls pick uniformly among the remaining free slots, one at a time.

    The resulting slot set is a uniform subset of size ``total``, so loads
    follow the multivariate hypergeometric law; with all capacities infinite
    the throw is the plain multinomial one.
    """
    from .rng import make_rng

    if trials < 1:
        raise DomainError("trials must be at least 1")
    rng = make_rng(seed, "capacitated-mc")
    caps = model.capacities
    if all(math.isinf(c) for c in caps):
        loads = rng.multinomial(model.total, [1.0 / len(caps)] * len(caps), size=trials)
    elif any(math.isinf(c) for c in caps):
        raise DomainError("mixing finite and infinite capacities is not supported")
    else:
        colors = np.asarray([int(c) for c in caps], dtype=np.int64)
        if model.total > colors.sum():
            raise DomainError("more balls than slots")
        loads = rng.multivariate_hypergeometric(colors, model.total, size=trials)
    empties = (loads == 0).sum(axis=1)
    maxes = loads.max(axis=1)
    e_vals, e_counts = np.unique(empties, return_counts=True)
    m_vals, m_counts = np.unique(maxes, return_counts=True)
    return ThrowStats(
        trials=trials,
        empty_pmf={int(v): float(c / trials) for v, c in zip(e_vals, e_counts)},
        empty_ci={int(v): wilson_interval(int(c), trials) for v, c in zip(e_vals, e_counts)},
        max_load_pmf={int(v): float(c / trials) for v, c in zip(m_vals, m_counts)},
        within_hard_cap=float((maxes <= model.hard_cap).mean()),
    )


# -- Poissonisation ----------------------------------------------------------

def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def poissonization_equiv_check(n_bins: int, total: int,
                               means=(Fraction(1, 2), Fraction(1), Fraction(7))) -> bool:
    """Exact check that i.i.d. Poisson loads conditioned on their sum are multinomial.

    The multinomial side counts all n_bins^total throws explicitly; the
    Poisson side uses weights mu^c / c! (the e^{-mu} factors cancel in the
    conditioning).
    """
    throws: dict[tuple[int, ...], int] = {}
    for seq in itertools.product(range(n_bins), repeat=total):
        loads = [0] * n_bins
        for b in seq:
            loads[b] += 1
        throws[tuple(loads)] = throws.get(tuple(loads), 0) + 1
    comps = list(compositions(total, n_bins))
    multinomial = {c: Fraction(throws.get(c, 0), n_bins ** total) for c in comps}
    for mu in means:
        mu = Fraction(mu)
        weight = {c: math.prod(mu ** x / math.factorial(x) for x in c) for c in comps}
        z = sum(weight.values())
        if any(weight[c] / z != multinomial[c] for c in comps):
            return False
    return sum(multinomial.values()) == 1


# -- supporters of uniform clauses -----------------------------------------

def _set_partitions(k: int):
    """Restricted growth strings: block label of each of k positions."""
    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            yield from rec(prefix + [b], max(top, b))
    yield from rec([0], 0)


def clause_support_law(n: int, k: int) -> tuple[Fraction, Fraction, Fraction]:
    """Law of the number of supporters of a uniform clause given it is NAE-satisfied.

    Returns (q0, q1, q2). Given the count, the supporter set is a uniform
    subset of the variables. Two supporters occur only when the clause has
    exactly two distinct variables, each with constant literal value.
    """
    full = (1 << k) - 1
    q = [Fraction(0)] * 3
    for labels in _set_partitions(k):
        blocks = max(labels) + 1
        if blocks > n:
            continue
        weight = Fraction(math.perm(n, blocks), n ** k)
        masks = [0] * blocks
        for j, b in enumerate(labels):
            masks[b] |= 1 << j
        for pattern in range(1, full):
            s = sum(1 for mask in masks if pattern == mask or pattern == full ^ mask)
            q[s] += weight / 2 ** k
    nae = 1 - Fraction(2, 2 ** k)
    return q[0] / nae, q[1] / nae, q[2] / nae


def support_occupancy_pmf(n: int, m: int, q1: float, q2: float = 0.0) -> np.ndarray:
    """pmf of the number of free variables when each of m clauses independently
    has one uniform supporter (prob q1), a uniform pair (prob q2), or none.

    Index j is Pr[j free variables].
    """
    if q1 < 0 or q2 < 0 or q1 + q2 > 1 + 1e-15:
        raise DomainError("invalid supporter law")
    if q2 and n < 2:
        raise DomainError("pairs need n >= 2")
    o = np.arange(n + 1, dtype=float)
    pairs = n * (n - 1) / 2 if n > 1 else 1.0
    single_up = (n - o) / n
    pair_up2 = (n - o) * (n - o - 1) / 2 / pairs
    pair_up1 = o * (n - o) / pairs
    occ = np.zeros(n + 1)
    occ[0] = 1.0
    q0 = 1.0 - q1 - q2
    for _ in range(m):
        new = q0 * occ
        new += q1 * occ * (1 - single_up)
        new[1:] += q1 * (occ * single_up)[:-1]
        if q2:
            new += q2 * occ * (1 - pair_up1 - pair_up2)
            new[1:] += q2 * (occ * pair_up1)[:-1]
            new[2:] += q2 * (occ * pair_up2)[:-2]
        occ = new
    return occ[::-1].copy()


def single_supporter_pmf(n: int, m: int, p: float) -> np.ndarray:
    """Mixture over X ~ Bin(m, p) critical clauses of empty_bins_exact(n, X)."""
    out = np.zeros(n + 1)
    weights = binom.pmf(np.arange(m + 1), m, p)
    for x, w in enumerate(weights):
        out += w * empty_bins_exact(n, x)
    return out
