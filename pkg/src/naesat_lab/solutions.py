"""Exact solution-space analysis for small formulas.

Assignments are encoded as integers with x_i at bit n - i, so numeric order
of codes is lexicographic order of assignments (x1 most significant).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.stats import poisson

from .errors import BudgetError, DomainError, PreconditionError
from .formula import (Formula, RateParams, as_assignment, beta_of, red_positions,
                      support_profile)
from .psi import OverlapVector, ProfileFractions
from .rng import make_rng

ENUM_CAP = 28
PAIR_CAP = 20000
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_LOW_MASKS = [np.uint64(sum(1 << j for j in range(64) if (j >> b) & 1)) for b in range(6)]


def codes_to_matrix(codes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((np.asarray(codes, dtype=np.int64)[:, None] >> shifts) & 1).astype(np.uint8)


def assignment_code(sigma) -> int:
    a = as_assignment(sigma)
    out = 0
    for v in a:
        out = (out << 1) | int(v)
    return out


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x.astype(np.uint64))


# -- enumeration -------------------------------------------------------------

def _sweep(formula: Formula, chunk_words: int = 1 << 15):
    """Yield sorted solution codes chunk by chunk (bit-parallel, 64 per word)."""
    n = formula.n
    total = 1 << n
    nwords = max(1, total >> 6)
    valid = _ALL if total >= 64 else np.uint64((1 << total) - 1)
    clauses = [(formula.var_array[i], formula.neg_array[i]) for i in range(formula.m)]
    for w0 in range(0, nwords, chunk_words):
        w1 = min(nwords, w0 + chunk_words)
        idx = np.arange(w0, w1, dtype=np.uint64)
        words = []
        for i in range(1, n + 1):
            b = n - i
            if b < 6:
                words.append(np.full(idx.size, _LOW_MASKS[b], dtype=np.uint64))
            else:
                bit = (idx >> np.uint64(b - 6)) & np.uint64(1)
                words.append(np.where(bit == 1, _ALL, np.uint64(0)))
        ok = np.full(idx.size, valid, dtype=np.uint64)
        for vars_, negs in clauses:
            any_true = np.zeros(idx.size, dtype=np.uint64)
            all_true = np.full(idx.size, _ALL, dtype=np.uint64)
            for v, neg in zip(vars_, negs):
                lit = words[v] ^ _ALL if neg else words[v]
                any_true |= lit
                all_true &= lit
            ok &= any_true & ~all_true
            if not ok.any():
                break
        nz = np.flatnonzero(ok)
        if nz.size == 0:
            continue
        bits = np.unpackbits(ok[nz].view(np.uint8).reshape(nz.size, 8), axis=1, bitorder="little")
        rows, cols = np.nonzero(bits)
        yield ((w0 + nz[rows]).astype(np.int64) << 6) + cols.astype(np.int64)


def count_solutions(formula: Formula, cap: int = ENUM_CAP) -> int:
    _check_cap(formula, cap)
    return int(sum(c.size for c in _sweep(formula)))


def _check_cap(formula: Formula, cap: int):
    if formula.n > cap:
        raise BudgetError(f"n = {formula.n} exceeds the enumeration cap {cap}; "
                          f"raise the cap (memory grows like 2^n) or sample instead")


@dataclass(frozen=True)
class ProfileSummary:
    free_count: np.ndarray
    critical_count: np.ndarray
    max_support: np.ndarray


def profile_summaries(formula: Formula, matrix: np.ndarray, chunk: int = 1 << 16) -> ProfileSummary:
    """Free count, critical-clause count and max support per solution (flip test)."""
    Z, n = matrix.shape
    free = np.empty(Z, dtype=np.int64)
    crit = np.empty(Z, dtype=np.int64)
    maxs = np.empty(Z, dtype=np.int64)
    full = (1 << formula.k) - 1
    weights = (1 << np.arange(formula.k)).astype(np.int64)
    for s0 in range(0, Z, chunk):
        M = matrix[s0:s0 + chunk].astype(np.int64)
        counts = np.zeros((M.shape[0], n), dtype=np.int64)
        ncrit = np.zeros(M.shape[0], dtype=np.int64)
        for i in range(formula.m):
            vals = M[:, formula.var_array[i]] ^ formula.neg_array[i]
            pattern = vals @ weights
            critical = np.zeros(M.shape[0], dtype=bool)
            for v, mask in formula.clause_groups[i]:
                sup = (pattern == mask) | (pattern == (full ^ mask))
                counts[:, v] += sup
                critical |= sup
            ncrit += critical
        free[s0:s0 + chunk] = (counts == 0).sum(axis=1)
        crit[s0:s0 + chunk] = ncrit
        maxs[s0:s0 + chunk] = counts.max(axis=1) if n else 0
    return ProfileSummary(free, crit, maxs)


class SolutionSet:
    """All NAE-solutions of a formula in lexicographic order."""

    def __init__(self, formula: Formula, codes: np.ndarray):
        self.formula = formula
        self.codes = np.asarray(codes, dtype=np.int64)
        self.codes.setflags(write=False)

    @property
    def n(self) -> int:
        return self.formula.n

    def __len__(self) -> int:
        return int(self.codes.size)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = codes_to_matrix(self.codes, self.n)
        m.setflags(write=False)
        return m

    @cached_property
    def profiles(self) -> ProfileSummary:
        return profile_summaries(self.formula, self.matrix)

    def betas(self, params: RateParams) -> np.ndarray:
        scale = math.exp(-params.lam) * self.n
        return 1.0 - self.profiles.free_count / scale

    def index_of(self, sigma) -> int:
        code = assignment_code(sigma)
        i = int(np.searchsorted(self.codes, code))
        if i >= len(self) or self.codes[i] != code:
            raise PreconditionError("assignment is not a solution")
        return i

    def assignment(self, i: int) -> np.ndarray:
        return self.matrix[i]

    def distances_from(self, i: int) -> np.ndarray:
        return popcount(self.codes ^ self.codes[i]).astype(np.int64)


def enumerate_solutions(formula: Formula, cap: int = ENUM_CAP) -> SolutionSet:
    _check_cap(formula, cap)
    parts = list(_sweep(formula))
    codes = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return SolutionSet(formula, codes)


def beta_window_edges(params: RateParams, n: int, delta: float | None = None,
                      lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Window edges of width delta (default: one free variable, 1/(e^-lambda n))."""
    if delta is None:
        delta = 1.0 / (math.exp(-params.lam) * n)
    count = int(math.ceil((hi - lo) / delta))
    return lo + delta * np.arange(count + 1)


def count_beta_heavy(solutions: SolutionSet, params: RateParams, beta_window) -> int:
    lo, hi = beta_window
    b = solutions.betas(params)
    return int(np.count_nonzero((b >= lo) & (b < hi)))


# -- clusters ------------------------------------------------------------------

def cluster_radius(theta: float, n: int) -> int:
    """max(1, ceil(theta n)), guarding against float noise in theta n."""
    return max(1, math.ceil(theta * n - 1e-9))


@dataclass(frozen=True)
class ClusterDecomposition:
    theta: float
    radius: int
    solutions: SolutionSet
    ball_ids: np.ndarray
    component_labels: np.ndarray

    @property
    def n_balls(self) -> int:
        return int(self.ball_ids.max()) + 1 if self.ball_ids.size else 0

    @property
    def n_components(self) -> int:
        return int(self.component_labels.max()) + 1 if self.component_labels.size else 0

    def ball(self, i: int) -> np.ndarray:
        """Indices of C(sigma_i) = {tau: dist(sigma_i, tau) <= radius}."""
        return np.flatnonzero(self.solutions.distances_from(i) <= self.radius)

    def ball_codes(self, i: int) -> frozenset[int]:
        return frozenset(int(c) for c in self.solutions.codes[self.ball(i)])

    def components(self) -> list[np.ndarray]:
        order = np.argsort(self.component_labels, kind="stable")
        labels = self.component_labels[order]
        cuts = np.flatnonzero(np.diff(labels)) + 1
        return np.split(order, cuts)

    def n_beta(self, params: RateParams, beta_window) -> int:
        """Distinct balls C(sigma) over beta-heavy sigma in the window."""
        lo, hi = beta_window
        b = self.solutions.betas(params)
        sel = (b >= lo) & (b < hi)
        return int(np.unique(self.ball_ids[sel]).size)


def _pair_blocks(codes: np.ndarray, block: int = 1024):
    for s in range(0, codes.size, block):
        yield s, popcount(codes[s:s + block, None] ^ codes[None, :])


def cluster_decomposition(solutions: SolutionSet, theta: float) -> ClusterDecomposition:
    if not 0 < theta <= 1:
        raise DomainError("theta must lie in (0, 1]")
    Z = len(solutions)
    if Z > PAIR_CAP:
        raise BudgetError(f"{Z} solutions exceed the pairwise cap {PAIR_CAP}")
    radius = cluster_radius(theta, solutions.n)
    ball_ids = np.zeros(Z, dtype=np.int64)
    seen: dict[bytes, int] = {}
    rows, cols = [], []
    for s, d in _pair_blocks(solutions.codes):
        close = d <= radius
        for r in range(close.shape[0]):
            key = np.packbits(close[r]).tobytes()
            ball_ids[s + r] = seen.setdefault(key, len(seen))
        rr, cc = np.nonzero(close)
        rows.append(rr + s)
        cols.append(cc)
    if Z:
        rr = np.concatenate(rows)
        cc = np.concatenate(cols)
        graph = coo_matrix((np.ones(rr.size, dtype=np.int8), (rr, cc)), shape=(Z, Z)).tocsr()
        _, labels = connected_components(graph, directed=False)
        # relabel components in order of first appearance
        _, first = np.unique(labels, return_index=True)
        remap = np.empty(labels.max() + 1, dtype=np.int64)
        remap[labels[np.sort(first)]] = np.arange(first.size)
        labels = remap[labels]
    else:
        labels = np.zeros(0, dtype=np.int64)
    return ClusterDecomposition(theta, radius, solutions, ball_ids, labels)


def sp_sample(clusters: ClusterDecomposition, seed: int, count: int) -> np.ndarray:
    """Pick a component uniformly, then a member uniformly; returns a (count, n) array."""
    if len(clusters.solutions) == 0:
        raise DomainError("no solutions to sample")
    rng = make_rng(seed, "sp-sample")
    comps = clusters.components()
    picks = rng.integers(0, len(comps), size=count)
    idx = np.array([comps[c][rng.integers(0, comps[c].size)] for c in picks], dtype=np.int64)
    return clusters.solutions.matrix[idx] if count else np.zeros((0, clusters.solutions.n), np.uint8)


def uniform_sample(solutions: SolutionSet, seed: int, count: int) -> np.ndarray:
    rng = make_rng(seed, "uniform-sample")
    return solutions.matrix[rng.integers(0, len(solutions), size=count)]


# -- rigidity ------------------------------------------------------------------

@dataclass(frozen=True)
class RigidResult:
    rigid: frozenset[int]
    cluster_rigid: frozenset[int]
    xi: float
    radius: int


def rigid_variables(solutions: SolutionSet, sigma, xi: float, theta: float = 0.01) -> RigidResult:
    """x is xi-rigid when every solution disagreeing with sigma on x lies at distance >= xi n.

    ``cluster_rigid`` lists the variables constant on the ball C(sigma) of
    radius max(1, ceil(theta n)).
    """
    i = solutions.index_of(sigma)
    n = solutions.n
    dist = solutions.distances_from(i)
    diff = solutions.matrix != solutions.matrix[i]
    nearest = np.where(diff, dist[:, None], n + 1).min(axis=0)
    rigid = frozenset(int(x) + 1 for x in np.flatnonzero(nearest >= xi * n - 1e-9))
    radius = cluster_radius(theta, n)
    inside = dist <= radius
    moved = diff[inside].any(axis=0)
    cluster_rigid = frozenset(int(x) + 1 for x in np.flatnonzero(~moved))
    return RigidResult(rigid, cluster_rigid, xi, radius)


# -- self-contained sets -------------------------------------------------------

@dataclass(frozen=True)
class CoreResult:
    R: frozenset[int]
    attached: frozenset[int]
    special_clauses: dict[int, int]


def _supported_lists(formula: Formula, sigma) -> dict[int, list[int]]:
    prof = support_profile(formula, sigma)
    out: dict[int, list[int]] = {}
    for i, sup in enumerate(prof.supporters):
        for x in sup:
            out.setdefault(x, []).append(i)
    return out


def _clause_vars(formula: Formula, i: int) -> set[int]:
    return {abs(l) for l in formula.clauses[i]}


def _inner_support(formula, x, supported, special, R) -> int:
    return sum(1 for i in supported.get(x, ()) if i != special.get(x) and _clause_vars(formula, i) <= R)


def self_contained_core(formula: Formula, sigma, seed: int, order_seed: int | None = None) -> CoreResult:
    """Random special clause per supporting variable, start from variables
    supporting at least four clauses, then peel variables with fewer than two
    non-special supported clauses inside R.

    The surviving set is the largest subset of the start set that satisfies
    the peeling condition, so it does not depend on the removal order;
    ``order_seed`` randomises that order for testing.
    """
    supported = _supported_lists(formula, sigma)
    rng = make_rng(seed, "special-clauses")
    special = {x: clauses[int(rng.integers(0, len(clauses)))] for x, clauses in sorted(supported.items())}
    R = {x for x, clauses in supported.items() if len(clauses) >= 4}
    order_rng = make_rng(order_seed, "peel-order") if order_seed is not None else None
    while True:
        failing = sorted(x for x in R if _inner_support(formula, x, supported, special, R) < 2)
        if not failing:
            break
        x = failing[int(order_rng.integers(0, len(failing)))] if order_rng is not None else failing[0]
        R.discard(x)
    for x in R:
        assert _inner_support(formula, x, supported, special, R) >= 2
    attached = set()
    for x, clauses in supported.items():
        for i in clauses:
            others = {abs(l) for l in formula.clauses[i] if abs(l) != x}
            if others <= R:
                attached.add(x)
                break
    return CoreResult(frozenset(R), frozenset(attached), special)


def dense_check(formula: Formula, sigma, subset) -> bool:
    """Each x in S supports at least two clauses that feature another variable of S."""
    S = set(int(x) for x in subset)
    if not S:
        return True
    if any(not 1 <= x <= formula.n for x in S):
        raise DomainError("subset contains an unknown variable")
    supported = _supported_lists(formula, sigma)
    for x in S:
        hits = sum(1 for i in supported.get(x, ()) if (_clause_vars(formula, i) - {x}) & S)
        if hits < 2:
            return False
    return True


# -- pair statistics -----------------------------------------------------------

@dataclass(frozen=True)
class PairProfileStats:
    red_overlap: int
    gamma_count: int
    overlap: OverlapVector
    fractions: ProfileFractions
    good_pair: bool
    distance: int


def pair_profile_stats(formula: Formula, sigma, tau, params: RateParams | None = None) -> PairProfileStats:
    """Positional colourings of two solutions and their agreement fractions.

    Classes are keyed (tau colour, sigma colour). Gamma holds the positions
    that are sigma-blue and tau-red inside clauses with a sigma-red position.
    """
    from .formula import is_nae_solution

    s = as_assignment(sigma, formula.n)
    t = as_assignment(tau, formula.n)
    if not (is_nae_solution(formula, s) and is_nae_solution(formula, t)):
        raise PreconditionError("both assignments must be NAE-solutions")
    params = params or RateParams.for_formula(formula)
    n, k = formula.n, formula.k
    rs = red_positions(formula, s)
    rt = red_positions(formula, t)
    agree = (s == t)[formula.var_array] if formula.m else np.zeros((0, k), dtype=bool)
    crit = rs.any(axis=1, keepdims=True)
    gamma = ~rs & rt & crit

    def frac(mask):
        tot = int(mask.sum())
        return (None if tot == 0 else float(agree[mask].sum()) / tot), tot

    a_rr, c_rr = frac(rt & rs)
    a_rb, c_rb = frac(rt & ~rs)
    a_br, c_br = frac(~rt & rs)
    a_bb, c_bb = frac(~rt & ~rs)
    a_g, c_g = frac(gamma)
    R = c_rr
    lo, hi = k / (3 * 2 ** k), 3 * k / 2 ** k
    glo, ghi = k * k / (3 * 2 ** k), 3 * k * k / 2 ** k
    good = lo <= R / n <= hi and glo <= c_g / n <= ghi
    return PairProfileStats(
        red_overlap=R,
        gamma_count=c_g,
        overlap=OverlapVector(a_rr, a_rb, a_br, a_bb, a_g),
        fractions=ProfileFractions(c_rr / n, c_rb / n, c_br / n, c_bb / n, c_g / n),
        good_pair=bool(good),
        distance=int(np.count_nonzero(s != t)),
    )


@dataclass(frozen=True)
class DistanceHistogram:
    counts: np.ndarray
    pairs: int
    radius: int
    far_edge: float
    dichotomy_mass: float


def _histogram_result(counts: np.ndarray, n: int, k: int, theta: float) -> DistanceHistogram:
    pairs = int(counts.sum())
    radius = cluster_radius(theta, n)
    far = (0.5 - 2.0 ** (-k / 3)) * n
    d = np.arange(counts.size)
    band = (d > radius) & (d < far)
    mass = float(counts[band].sum()) / pairs if pairs else 0.0
    return DistanceHistogram(counts, pairs, radius, far, mass)


def pair_distance_histogram(solutions: SolutionSet, theta: float = 0.01) -> DistanceHistogram:
    """Exact distance counts over unordered pairs and the mass strictly between
    the cluster radius and (1/2 - 2^{-k/3}) n."""
    n = solutions.n
    Z = len(solutions)
    if Z > PAIR_CAP:
        raise BudgetError(f"{Z} solutions exceed the pairwise cap {PAIR_CAP}")
    counts = np.zeros(n + 1, dtype=np.int64)
    for s, d in _pair_blocks(solutions.codes):
        rows = np.arange(s, s + d.shape[0])[:, None]
        upper = np.arange(Z)[None, :] > rows
        counts += np.bincount(d[upper].astype(np.int64), minlength=n + 1)
    return _histogram_result(counts, n, solutions.formula.k, theta)


def sampled_distance_histogram(sampler: Callable[[np.random.Generator], np.ndarray], pairs: int,
                               n: int, k: int, seed: int, theta: float = 0.01) -> DistanceHistogram:
    """Monte Carlo version: each pair is two independent sampler draws."""
    rng = make_rng(seed, "distance-pairs")
    counts = np.zeros(n + 1, dtype=np.int64)
    for _ in range(pairs):
        a, b = sampler(rng), sampler(rng)
        counts[int(np.count_nonzero(np.asarray(a) != np.asarray(b)))] += 1
    return _histogram_result(counts, n, k, theta)


def mean_distance_ci(samples: np.ndarray, z: float = 2.576) -> tuple[float, float, float]:
    """Mean distance over consecutive disjoint pairs of samples, with a normal CI."""
    half = samples.shape[0] // 2
    d = np.count_nonzero(samples[:half] != samples[half:2 * half], axis=1).astype(float)
    if d.size < 2:
        return (float(d.mean()) if d.size else math.nan, math.nan, math.nan)
    se = d.std(ddof=1) / math.sqrt(d.size)
    return float(d.mean()), float(d.mean() - z * se), float(d.mean() + z * se)


# -- conditioned support skew --------------------------------------------------

@dataclass(frozen=True)
class SkewResult:
    pmf: dict[int, float]
    trials: int
    accepted: int
    tv_to_poisson: float | None
    empty: bool


def sample_conditioned_formula(n: int, m: int, k: int, rng: np.random.Generator) -> Formula:
    """Uniform formula conditioned on the all-ones assignment being an NAE-solution.

    Clauses are independent, so each clause's sign row is redrawn until it
    is not constant.
    """
    variables = rng.integers(1, n + 1, size=(m, k))
    signs = rng.integers(0, 2, size=(m, k))
    bad = (signs.min(axis=1) == signs.max(axis=1))
    while bad.any():
        signs[bad] = rng.integers(0, 2, size=(int(bad.sum()), k))
        bad = (signs.min(axis=1) == signs.max(axis=1))
    return Formula.from_arrays(n, variables, np.where(signs == 1, 1, -1))


def conditioned_support_skew(n: int, m: int, k: int, beta_window, trials: int, seed: int,
                             min_accept_rate: float = 0.01) -> SkewResult:
    """Empirical law of s_x given that the all-ones assignment is a solution
    whose beta lies in the window."""
    if trials == 0:
        return SkewResult({}, 0, 0, None, True)
    params = RateParams(k, m / n)
    lo, hi = beta_window
    ones = np.ones(n, dtype=np.uint8)
    pooled = []
    accepted = 0
    for t in range(trials):
        rng = make_rng(seed, "skew", t)
        F = sample_conditioned_formula(n, m, k, rng)
        prof = support_profile(F, ones)
        b = beta_of(prof, params, n)
        if lo <= b < hi:
            accepted += 1
            pooled.append(prof.support_counts)
    if accepted / trials < min_accept_rate:
        raise DomainError(f"acceptance rate {accepted}/{trials} below floor {min_accept_rate}; "
                          f"widen the beta window or raise trials")
    if not accepted:
        return SkewResult({}, trials, 0, None, True)
    s = np.concatenate(pooled)
    vals = np.bincount(s)
    pmf = {int(i): float(c) / s.size for i, c in enumerate(vals) if c}
    top = max(vals.size, int(poisson.ppf(1 - 1e-12, params.lam)) + 1)
    emp = np.zeros(top)
    emp[:vals.size] = vals / s.size
    ref = poisson.pmf(np.arange(top), params.lam)
    tv = 0.5 * (np.abs(emp - ref).sum() + max(0.0, 1 - ref.sum()))
    return SkewResult(pmf, trials, accepted, float(tv), False)


# -- good solutions --------------------------------------------------------------

@dataclass(frozen=True)
class GoodBreakdown:
    good: bool
    failed: tuple[str, ...]
    critical_count: int
    lambda_n_rounded: int
    free_count: int
    heavy_target: int | None
    max_support: int
    near_count: int
    log_near_per_n: float
    condition3_bound: float


def is_beta_good(formula: Formula, sigma, params: RateParams | None = None, *, beta: float | None = None,
                 slack_multiplier: float = 1.0, solutions: SolutionSet | None = None) -> GoodBreakdown:
    """The three conditions of beta-goodness on an enumerable instance.

    1. beta-heavy (checked against ``beta`` when given, otherwise beta is
       read off sigma) with critical count equal to lambda n rounded.
    2. No variable supports more than 3k clauses.
    3. (1/n) ln #{tau: dist/n <= 1/2 - 2^{-k/3}} <= (1-beta) e^-lambda ln 2
       + slack_multiplier * k^13 4^-k.
    """
    params = params or RateParams.for_formula(formula)
    n, k = formula.n, formula.k
    prof = support_profile(formula, sigma)
    lam_n = int(round(params.lam * n))
    scale = math.exp(-params.lam) * n
    failed = []
    heavy_target = None
    if beta is None:
        beta = beta_of(prof, params, n)
    else:
        heavy_target = int(round((1 - beta) * scale))
        if prof.n_free != heavy_target:
            failed.append("condition 1")
    if prof.n_critical != lam_n and "condition 1" not in failed:
        failed.append("condition 1")
    max_support = int(prof.support_counts.max()) if n else 0
    if max_support > 3 * k:
        failed.append("condition 2")
    if solutions is None:
        solutions = enumerate_solutions(formula)
    i = solutions.index_of(sigma)
    near = int(np.count_nonzero(solutions.distances_from(i) <= (0.5 - 2.0 ** (-k / 3)) * n))
    log_near = math.log(near) / n
    bound = (1 - beta) * math.exp(-params.lam) * math.log(2) + slack_multiplier * k ** 13 * 4.0 ** (-k)
    if log_near > bound:
        failed.append("condition 3")
    return GoodBreakdown(not failed, tuple(failed), prof.n_critical, lam_n, prof.n_free, heavy_target,
                         max_support, near, log_near, bound)


@dataclass(frozen=True)
class SimpleGoodBreakdown:
    good: bool
    failed: tuple[str, ...]
    ball_size: int
    middle_band_count: int
    max_support: int


def is_good_simple(formula: Formula, sigma, expected_z_beta: float, theta: float = 0.01,
                   solutions: SolutionSet | None = None) -> SimpleGoodBreakdown:
    """The three bullet conditions: ball size at most E[Z_beta], no solution in
    the band [theta n, (1/2 - 2^{-k/3}) n], support at most 3k."""
    n, k = formula.n, formula.k
    solutions = solutions or enumerate_solutions(formula)
    i = solutions.index_of(sigma)
    d = solutions.distances_from(i)
    ball = int(np.count_nonzero(d <= cluster_radius(theta, n)))
    band = int(np.count_nonzero((d >= theta * n) & (d <= (0.5 - 2.0 ** (-k / 3)) * n)))
    max_support = int(support_profile(formula, sigma).support_counts.max())
    failed = []
    if ball > expected_z_beta:
        failed.append("ball size")
    if band:
        failed.append("distance band")
    if max_support > 3 * k:
        failed.append("support")
    return SimpleGoodBreakdown(not failed, tuple(failed), ball, band, max_support)
