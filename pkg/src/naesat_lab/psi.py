"""Per-clause-type exponents of the pair probability.

Conventions: sigma is taken to be the all-ones assignment; for a clause
position, t = 1 means tau agrees with sigma there. Colour classes are
written (tau colour, sigma colour): ``g_rb`` counts positions that are
tau-red and sigma-blue. ``a`` is the agreement probability on positions
that are blue under both assignments.

Every term is per n. See ``psi_breakdown`` for the two documented
departures from the typeset formulas and the flags that restore them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .formula import RateParams

LN2 = math.log(2)


@dataclass(frozen=True)
class ProfileFractions:
    """Position counts per n by colour class, plus gamma = |Gamma| / n."""

    g_rr: float
    g_rb: float
    g_br: float
    g_bb: float
    gamma: float


@dataclass(frozen=True)
class OverlapVector:
    """Agreement fractions per colour class; None marks an empty class."""

    a_rr: float | None
    a_rb: float | None
    a_br: float | None
    a_bb: float | None
    a_gamma: float | None

    @classmethod
    def constant(cls, alpha: float) -> "OverlapVector":
        return cls(alpha, alpha, alpha, alpha, alpha)

    def undefined(self) -> tuple[str, ...]:
        return tuple(name for name in ("a_rr", "a_rb", "a_br", "a_bb", "a_gamma")
                     if getattr(self, name) is None)


@dataclass(frozen=True)
class PsiBreakdown:
    psi_sigma: float
    psi_rr: float
    psi_gamma: float
    psi_rb: float
    psi_br: float
    psi_bb: float
    xi: float
    alpha_xi: float | None
    zeta: float
    alpha_zeta: float | None
    eta_a: float
    total: float


def eta_printed(a: float, k: int) -> float:
    """The polynomial eta(a) exactly as typeset.

    It equals 2^{k-1} times the probability that a clause is all-equal or
    critical under sigma and also under tau, for uniform signs and i.i.d.
    agreement bits with mean a.
    """
    b = 1 - a
    first = a ** k + b ** k + k * a * b ** (k - 1) + k * a ** (k - 1) * b
    inner = (a * b ** (k - 1) + b * a ** (k - 1) + a ** k + b ** k
             + (k - 1) * a ** (k - 2) * b ** 2 + (k - 1) * a ** 2 * b ** (k - 2))
    return first + k * inner


def noncritical_bracket(a: float, k: int) -> float:
    """1 - a^{k-1} - (1-a)^{k-1} - (k-1) a (1-a)^{k-2}."""
    b = 1 - a
    return 1 - a ** (k - 1) - b ** (k - 1) - (k - 1) * a * b ** (k - 2)


def _log(x: float, term: str) -> float:
    if not x > 0:
        raise DomainError(f"non-positive log operand {x!r} in {term}")
    return math.log(x)


def _weighted(alpha: float, lp1: float, lp0: float) -> float:
    # avoid 0 * (-inf) when a class is entirely one-sided
    out = 0.0
    if alpha != 0:
        out += alpha * lp1
    if alpha != 1:
        out += (1 - alpha) * lp0
    return out


def psi_breakdown(params: RateParams, fractions: ProfileFractions, overlap: OverlapVector, *,
                  alpha_form: str = "counting", bb_form: str = "conditional",
                  bb_count: str = "printed") -> PsiBreakdown:
    """Evaluate every per-clause-type term and their sum.

    alpha_form
        ``"counting"`` uses alpha_xi = (alpha_rb g_rb - alpha_Gamma gamma) / xi,
        the share of t = 1 among tau-red positions outside Gamma (likewise
        alpha_zeta). ``"printed"`` uses g_rb (alpha_rb - alpha_Gamma gamma) / xi
        as typeset.
    bb_form
        ``"conditional"`` uses ln[1 - (1 + k - eta(a)) / (2^{k-1} - k - 1)], the
        probability that tau is NAE and non-critical on a clause given that
        sigma is. ``"proof_text"`` uses ln(eta(a) / (1 - (k+1) 2^{1-k})).
    bb_count
        ``"printed"`` weights the blue-blue term by r - 2 lambda + g_rr;
        ``"derived"`` by r - lambda - xi, the number of clauses that are blue
        under both assignments.
    """
    k, r, lam = params.k, params.r, params.lam
    f = fractions
    a = overlap.a_bb
    if a is None or not 0 < a < 1:
        raise DomainError("a = alpha_bb must lie in (0, 1)")
    xi = f.g_rb - f.gamma
    zeta = f.g_br - f.gamma
    if xi < 0:
        raise DomainError(f"xi = g_rb - gamma = {xi} is negative")
    if zeta < 0:
        raise DomainError(f"zeta = g_br - gamma = {zeta} is negative")

    psi_sigma = (1 - k) * lam * LN2 + (r - lam) * _log(1 - (k + 1) * 2.0 ** (1 - k), "psi_sigma")

    la, lb = _log(a, "psi_rr"), _log(1 - a, "psi_rr")
    psi_rr = 0.0
    if f.g_rr:
        psi_rr = f.g_rr * (k - 1) * _weighted(_need(overlap.a_rr, "a_rr"), la, lb)
    psi_gamma = 0.0
    if f.gamma:
        psi_gamma = f.gamma * (k - 2) * _weighted(_need(overlap.a_gamma, "a_gamma"), lb, la)

    b1 = _log(noncritical_bracket(a, k), "psi_rb/psi_br")
    b0 = _log(noncritical_bracket(1 - a, k), "psi_rb/psi_br")

    def side_alpha(alpha_c, g_c, width, name):
        if width == 0:
            return None
        alpha_c = _need(alpha_c, name)
        ag = overlap.a_gamma if f.gamma else 0.0
        ag = _need(ag, "a_gamma")
        if alpha_form == "counting":
            val = (alpha_c * g_c - ag * f.gamma) / width
        elif alpha_form == "printed":
            val = g_c * (alpha_c - ag * f.gamma) / width
        else:
            raise DomainError(f"unknown alpha_form {alpha_form!r}")
        if alpha_form == "counting" and not -1e-12 <= val <= 1 + 1e-12:
            raise DomainError(f"side fraction derived from {name} is {val}, outside [0, 1]")
        return val

    alpha_xi = side_alpha(overlap.a_rb, f.g_rb, xi, "a_rb")
    alpha_zeta = side_alpha(overlap.a_br, f.g_br, zeta, "a_br")
    psi_rb = psi_br = 0.0
    if xi:
        psi_rb = -xi * _log(2 ** (k - 1) - k - 1, "psi_rb") + xi * _weighted(alpha_xi, b1, b0)
    if zeta:
        psi_br = zeta * _weighted(alpha_zeta, b1, b0)

    eta_a = eta_printed(a, k)
    if bb_form == "conditional":
        per_clause = _log(1 - (1 + k - eta_a) / (2 ** (k - 1) - k - 1), "psi_bb")
    elif bb_form == "proof_text":
        per_clause = _log(eta_a / (1 - (k + 1) * 2.0 ** (1 - k)), "psi_bb")
    else:
        raise DomainError(f"unknown bb_form {bb_form!r}")
    if bb_count == "printed":
        count = r - 2 * lam + f.g_rr
    elif bb_count == "derived":
        count = r - lam - xi
    else:
        raise DomainError(f"unknown bb_count {bb_count!r}")
    psi_bb = count * per_clause

    total = psi_sigma + psi_gamma + psi_rr + psi_rb + psi_br + psi_bb
    return PsiBreakdown(psi_sigma, psi_rr, psi_gamma, psi_rb, psi_br, psi_bb,
                        xi, alpha_xi, zeta, alpha_zeta, eta_a, total)


def _need(value, name):
    if value is None:
        raise DomainError(f"overlap component {name} is undefined but its class is non-empty")
    if not 0 <= value <= 1:
        raise DomainError(f"overlap component {name} = {value} outside [0, 1]")
    return value


def canonical_profile(k: int, offset: float = 0.2) -> tuple[RateParams, ProfileFractions]:
    """A reference point: r = r_star_closed - offset with good-profile midpoints.

    g_rr = k 2^-k and gamma = k^2 2^-k (geometric midpoints of the good
    ranges); the tau-red and sigma-red counts both equal lambda.
    """
    r = 2 ** (k - 1) * LN2 - LN2 / 2 - 0.25 - offset
    params = RateParams(k, r)
    lam = params.lam
    g_rr = k * 2.0 ** (-k)
    gamma = k * k * 2.0 ** (-k)
    g_rb = g_br = lam - g_rr
    g_bb = k * r - 2 * lam + g_rr
    return params, ProfileFractions(g_rr, g_rb, g_br, g_bb, gamma)


def combined_exponent(params: RateParams, fractions: ProfileFractions, t: float, **kw) -> float:
    """psi total along overlap (1/2 + t) 1 plus the pair-count entropy term -4 t^2."""
    ov = OverlapVector.constant(0.5 + t)
    return psi_breakdown(params, fractions, ov, **kw).total - 4 * t * t
