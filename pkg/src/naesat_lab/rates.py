"""Closed-form exponents, thresholds and related bounds.

Every asymptotic remainder (o_k(1), O_k(.) terms, polynomial prefactors)
is dropped from the returned numbers; result objects list the dropped
terms in ``asymptotic_terms_dropped`` so comparisons stay honest.

Units: ``f``, ``h``, ``g`` are per-n exponents. ``eta`` and
``z_simplified`` are in units of n / 2^k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .errors import DomainError
from .formula import RateParams
from .numerics import bisect, entropy, expand_bracket, xlogx

LN2 = math.log(2)
BETA_TOL = 1e-12

BETA_DROPPED = (
    "o_k(1) correction inside eta",
    "O_k(4^-k) remainder of the empty-bin rate f",
    "polynomial prefactors (per-n O(ln n / n))",
)


@dataclass(frozen=True)
class BetaExponents:
    beta: float
    f: float
    h: float
    g: float
    eta: float
    z_simplified: float
    asymptotic_terms_dropped: tuple[str, ...] = BETA_DROPPED


def _check_beta(beta: float) -> float:
    if beta > 1 + BETA_TOL:
        raise DomainError(f"beta = {beta} exceeds 1")
    return min(beta, 1.0)


def _entropy_gap(beta: float) -> float:
    """(1-beta) ln(1-beta) + beta, which is >= 0 and ~ beta^2/2 near 0."""
    if abs(beta) < 1e-3:
        return math.fsum(beta ** j / (j * (j - 1)) for j in range(2, 12))
    return xlogx(1 - beta) + beta


def f_rate(params: RateParams, beta: float) -> float:
    """Per-n log of Pr[Bin(n, e^-lambda) = (1-beta) e^-lambda n], leading order."""
    beta = _check_beta(beta)
    return -_entropy_gap(beta) * math.exp(-params.lam)


def eta(params: RateParams, beta: float) -> float:
    beta = _check_beta(beta)
    return 2 * params.rho - LN2 - xlogx(1 - beta) - (1 - beta) * LN2 - beta


def beta_exponents(params: RateParams, beta: float) -> BetaExponents:
    beta = _check_beta(beta)
    k = params.k
    f = f_rate(params, beta)
    h = (2 * params.rho - LN2) / 2 ** k + f
    g = h - (1 - beta) * math.exp(-params.lam) * LN2
    z = 2 * params.rho - LN2 - xlogx(1 - beta) - beta
    return BetaExponents(beta, f, h, g, eta(params, beta), z)


def first_moment_exponent(params: RateParams) -> float:
    """(1/n) ln E[Z] = ln 2 + r ln(1 - 2^{1-k})."""
    return LN2 + params.r * math.log1p(-(2.0 ** (1 - params.k)))


def pair_exponent(params: RateParams, alpha: float) -> float:
    """Per-n exponent of the expected number of solution pairs at overlap alpha."""
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    k = params.k
    inner = -(2.0 ** (2 - k)) + 2.0 ** (1 - k) * (alpha ** k + (1 - alpha) ** k)
    return LN2 + entropy(alpha) + params.r * math.log1p(inner)


# -- thresholds -----------------------------------------------------------

@dataclass(frozen=True)
class ThresholdBounds:
    k: int
    r_first_exact: float
    r_first_asymp: float
    r_first_gap: float
    r_cond: float
    r_sh_estimate: float
    r_star_closed: float
    r_star_numeric: float
    r_star_gap: float
    r_star_lower: float
    rho_star_closed: float
    rho_star_numeric: float
    eps_k_note: str = ("the vanishing sequence eps_k of the main threshold theorem has no "
                       "explicit constant and is not computed")
    asymptotic_terms_dropped: tuple[str, ...] = (
        "O_k(k^3 2^-k) remainder in r_star_closed",
        "o_k(1) in r_cond",
        "(1+o(1)) factor in r_sh_estimate",
    )


def first_moment_gap(k: int) -> float:
    """-ln2 / ln(1-x) - (2^{k-1} ln2 - ln2/2) with x = 2^{1-k}, without cancellation.

    With L = -ln(1-x) = x(1 + x u), u = sum_{j>=2} x^{j-2}/j, the gap equals
    ln2 * x (u - v) / (2 (1 + x u)) where v = sum_{j>=3} 2 x^{j-3}/j.
    """
    if k < 3:
        raise DomainError("need k >= 3")
    x = 2.0 ** (1 - k)
    u = sum(x ** (j - 2) / j for j in range(2, 64))
    v = sum(2 * x ** (j - 3) / j for j in range(3, 64))
    return LN2 * x * (u - v) / (2 * (1 + x * u))


def rho_star_center(tol: float = 1e-13) -> float:
    """Root in rho of eta(1/2) = 2 rho - ln2 - 1/2 by bisection."""
    return bisect(lambda rho: 2 * rho - LN2 - 0.5, 0.0, 2.0, tol=tol)


def _g_half_scaled(k: int, rho: float) -> float:
    """2^k * (g(1/2) + k^3 4^{1-k}) written in rho, stable for large k."""
    c = 2 ** (k - 1) - 1
    # e^{-lambda} 2^{k-1} with lambda = k ln2 + k (ln2 - rho) / (2^{k-1} - 1)
    scaled = 0.5 * math.exp(-k * (LN2 - rho) / c)
    return 2 * rho - LN2 - scaled + 4 * k ** 3 * 2.0 ** (-k)


def thresholds(k: int) -> ThresholdBounds:
    if k < 3:
        raise DomainError("thresholds need k >= 3")
    top = 2 ** (k - 1) * LN2
    r_first_asymp = top - LN2 / 2
    gap = first_moment_gap(k)
    rho_closed = rho_star_center()
    # the scaled g is positive at the closed-form centre; the root we want lies
    # below it (at small k a second, negative-density root sits far above)
    lo, hi = expand_bracket(lambda rho: _g_half_scaled(k, rho), rho_closed - 1.0, rho_closed,
                            fixed_hi=True)
    rho_num = bisect(lambda rho: _g_half_scaled(k, rho), lo, hi, tol=1e-15)
    r_star_closed = top - LN2 / 2 - 0.25
    return ThresholdBounds(
        k=k,
        r_first_exact=r_first_asymp + gap,
        r_first_asymp=r_first_asymp,
        r_first_gap=gap,
        r_cond=top - LN2,
        r_sh_estimate=2 ** (k - 1) * math.log(k) / k,
        r_star_closed=r_star_closed,
        r_star_numeric=top - rho_num,
        r_star_gap=rho_closed - rho_num,
        r_star_lower=r_star_closed - k ** 14 * 2.0 ** (-k),
        rho_star_closed=rho_closed,
        rho_star_numeric=rho_num,
    )


# -- feasibility ----------------------------------------------------------

def feasible_beta_interval(params: RateParams) -> tuple[float, float] | None:
    """Interval where eta > 0, or None if eta(1/2) <= 0.

    eta is strictly concave with its maximum at 1/2, so the set is an
    interval; the upper end is 1 when eta stays positive up to beta = 1.
    """
    e = lambda b: eta(params, b)
    if e(0.5) <= 0:
        return None
    lo_a, _ = expand_bracket(e, -1.0, 0.5, fixed_hi=True)
    lo = bisect(e, lo_a, 0.5)
    hi = 1.0 if e(1.0) >= 0 else bisect(e, 0.5, 1.0)
    return lo, hi


def beta_star(params: RateParams, margin: float = 0.0) -> float | None:
    """Maximiser over (0, 1/2] of the per-n g(beta), if the maximum exceeds margin."""
    g = lambda b: beta_exponents(params, b).g
    res = minimize_scalar(lambda b: -g(b), bounds=(0.0, 0.5), method="bounded",
                          options={"xatol": 1e-12})
    best = max((float(res.x), 0.5), key=g)
    return best if g(best) > margin else None


def eta_prime(beta: float) -> float:
    return math.log(2 - 2 * beta)


def eta_argmax(params: RateParams) -> float:
    """Maximiser of eta, found as the root of its decreasing derivative.

    Value comparisons cannot place the maximum closer than about 1e-8
    because eta is quadratic there; the derivative can.
    """
    return bisect(eta_prime, -2.0, 0.999, tol=1e-15)


@dataclass(frozen=True)
class ZBetaGammaBound:
    value: float
    z_exponent: float
    penalty: float
    in_range: bool


def zbetagamma_bound(params: RateParams, beta: float, gamma: float) -> ZBetaGammaBound:
    """Per-n bound on ln E[Z_{beta,gamma}]; the penalty applies for gamma > k^{5/2} e^{-lambda}."""
    k = params.k
    z = beta_exponents(params, beta).h
    el = math.exp(-params.lam)
    in_range = gamma > k ** 2.5 * el
    penalty = math.log(k) / 6 * gamma * el if in_range else 0.0
    return ZBetaGammaBound(z - penalty, z, penalty, in_range)


# -- binomial asymptotics --------------------------------------------------

def binom_asympt(N: float, alpha: float, eps: float = 0.0) -> tuple[float, float]:
    """Approximate ln C(N, alpha N) and ln C(N, (alpha+eps) N).

    The shifted form keeps the first-order entropy correction
    eps * ln((1-alpha)/alpha) and drops the O(eps^2/alpha) term.
    """
    if not (0 < alpha <= 0.5 and -0.5 < eps < 0.5 and 0 < alpha + eps < 1):
        raise DomainError("need 0 < alpha <= 1/2, |eps| < 1/2, 0 < alpha + eps < 1")
    if N <= 0:
        raise DomainError("N must be positive")
    base = entropy(alpha) * N - 0.5 * math.log(2 * math.pi * alpha * (1 - alpha) * N)
    a2 = alpha + eps
    shifted = (entropy(alpha) + eps * math.log((1 - alpha) / alpha)) * N \
        - 0.5 * math.log(2 * math.pi * a2 * (1 - a2) * N)
    return base, shifted


# -- tameness and the Taylor bound ----------------------------------------

@dataclass(frozen=True)
class TaylorConstants:
    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise DomainError("Taylor constants must be positive")


def tame_tolerances(k: int) -> tuple[float, float, float, float, float]:
    """Allowed deviations for (rr, rb, br, bb, gamma) components."""
    return (10 / math.sqrt(k), 2.0 ** (-k / 3), 2.0 ** (-k / 3), 2.0 ** (-k / 2), 100 / k)


def tame_check(overlap, alpha: float, k: int) -> bool:
    comps = (overlap.a_rr, overlap.a_rb, overlap.a_br, overlap.a_bb, overlap.a_gamma)
    for value, tol in zip(comps, tame_tolerances(k)):
        if value is None:
            continue
        if abs(value - alpha) > tol:
            return False
    return True


def taylor_bound(params: RateParams, fractions, delta, constants: TaylorConstants = TaylorConstants()) -> float:
    """Second-order remainder bound; ``delta`` is (d_rr, d_rb, d_br, d_bb, d_gamma)."""
    k = params.k
    d_rr, d_rb, d_br, d_bb, d_g = delta
    first = fractions.g_rr * (d_rr * d_bb + d_bb ** 2) + fractions.gamma * (d_g * d_bb + d_bb ** 2)
    second = d_rb * d_bb + d_br * d_bb + d_bb ** 2
    return constants.c1 * k * first + constants.c2 * (k ** 4 / 2 ** k) * second
