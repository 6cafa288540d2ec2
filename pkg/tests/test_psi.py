import math
from dataclasses import asdict, replace
from fractions import Fraction

import pytest

from naesat_lab import DomainError
from naesat_lab.formula import RateParams
from naesat_lab.psi import (OverlapVector, ProfileFractions, canonical_profile, combined_exponent,
                            eta_printed, noncritical_bracket, psi_breakdown)

from oracles import ClauseOracle, psi_terms_oracle

TERMS = ("psi_sigma", "psi_rr", "psi_gamma", "psi_rb", "psi_br", "psi_bb")


@pytest.mark.parametrize("ov", [
    OverlapVector(0.55, 0.48, 0.53, 0.47, 0.6),
    OverlapVector.constant(0.5),
    OverlapVector(0.3, 0.2, 0.25, 0.35, 0.1),
])
def test_terms_match_clause_oracle(ov):
    p, fr = canonical_profile(10)
    b = psi_breakdown(p, fr, ov)
    ref = psi_terms_oracle(10, p.r, p.lam, asdict(fr), asdict(ov))
    for name in TERMS:
        assert getattr(b, name) == pytest.approx(ref[name], abs=1e-10), name


def test_additivity():
    p, fr = canonical_profile(12)
    b = psi_breakdown(p, fr, OverlapVector(0.4, 0.45, 0.5, 0.52, 0.3))
    assert b.total == math.fsum(getattr(b, t) for t in TERMS)


def test_gamma_zero_and_half():
    p, fr = canonical_profile(10)
    fr0 = replace(fr, gamma=0.0)
    b = psi_breakdown(p, fr0, OverlapVector(0.7, 0.5, 0.5, 0.5, None))
    assert b.psi_gamma == 0.0
    # a = 1/2 makes psi_rr independent of alpha_rr
    for arr in (0.1, 0.9):
        b = psi_breakdown(p, fr, OverlapVector(arr, 0.5, 0.5, 0.5, 0.5))
        assert b.psi_rr == pytest.approx(fr.g_rr * 9 * math.log(0.5))


def test_side_widths():
    p, fr = canonical_profile(10)
    b = psi_breakdown(p, fr, OverlapVector.constant(0.5))
    assert b.xi == fr.g_rb - fr.gamma and b.zeta == fr.g_br - fr.gamma
    assert b.alpha_xi == pytest.approx(0.5)


def test_swap_moves_only_printed_term():
    p, fr = canonical_profile(10)
    fr = replace(fr, g_br=fr.g_rb * 1.3)
    ov = OverlapVector(0.5, 0.45, 0.55, 0.5, 0.5)
    a = psi_breakdown(p, fr, ov)
    swapped = psi_breakdown(p, replace(fr, g_rb=fr.g_br, g_br=fr.g_rb),
                            replace(ov, a_rb=ov.a_br, a_br=ov.a_rb))
    shift = -math.log(2 ** 9 - 11) * (a.xi - swapped.xi)
    assert a.total - swapped.total == pytest.approx(shift, rel=1e-12)


def test_bb_conditional_form_is_exact():
    """The conditional per-clause factor equals the exhaustive ratio exactly."""
    k = 6
    for a in (Fraction(1, 3), Fraction(1, 2), Fraction(4, 5)):
        eta_a = eta_printed(a, k)
        closed = 1 - (1 + k - eta_a) / (2 ** (k - 1) - k - 1)
        o = ClauseOracle(k, float(a))
        assert float(closed) == pytest.approx(o.blue_blue(), abs=1e-14)


def test_eta_printed_at_half():
    # at a = 1/2 tau is independent of sigma: 2^{k-1} ((k+1) 2^{1-k})^2
    for k in (4, 9, 15):
        assert eta_printed(0.5, k) == pytest.approx((k + 1) ** 2 * 2.0 ** (1 - k))
        assert noncritical_bracket(0.5, k) == pytest.approx(1 - (k + 1) * 2.0 ** (1 - k))


def test_canonical_derivatives():
    p, fr = canonical_profile(15)
    h = 1e-3
    f = lambda t: combined_exponent(p, fr, t)
    d1 = (f(h) - f(-h)) / (2 * h)
    d2 = (f(h) - 2 * f(0) + f(-h)) / h ** 2
    assert abs(d1) <= 1e-6
    assert d2 <= -0.1


def test_proof_text_form_is_selectable():
    p, fr = canonical_profile(15)
    ov = OverlapVector.constant(0.5)
    a = psi_breakdown(p, fr, ov)
    b = psi_breakdown(p, fr, ov, bb_form="proof_text")
    # both forms agree at a = 1/2 only to leading order
    assert a.psi_bb != b.psi_bb
    assert a.psi_sigma == b.psi_sigma
    # the proof-text factor is not a probability ratio and bends the wrong way
    f = lambda t: combined_exponent(p, fr, t, bb_form="proof_text")
    assert f(1e-3) - 2 * f(0) + f(-1e-3) > 0


def test_domain_errors():
    p, fr = canonical_profile(10)
    with pytest.raises(DomainError):
        psi_breakdown(p, fr, OverlapVector(0.5, 0.5, 0.5, 1.0, 0.5))
    with pytest.raises(DomainError, match="xi"):
        psi_breakdown(p, replace(fr, gamma=fr.g_rb + 1), OverlapVector.constant(0.5))
    with pytest.raises(DomainError, match="a_rr"):
        psi_breakdown(p, fr, OverlapVector(None, 0.5, 0.5, 0.5, 0.5))
    with pytest.raises(DomainError):
        psi_breakdown(p, fr, OverlapVector.constant(0.5), bb_form="nope")
    tiny = RateParams(3, 1.0)
    with pytest.raises(DomainError, match="psi"):
        psi_breakdown(tiny, ProfileFractions(0.0, 0.1, 0.1, 1.0, 0.0), OverlapVector.constant(0.5))
