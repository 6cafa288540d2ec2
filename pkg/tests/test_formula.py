import itertools
import math
from pathlib import Path

import numpy as np
import pytest

from naesat_lab import DomainError, PreconditionError
from naesat_lab.formula import (Formula, RateParams, as_assignment, beta_of, format_formula,
                                hamming_distance, invert, is_nae_solution, parse_formula,
                                read_formula, red_positions, support_profile, supporting_variable,
                                supporting_variables)

from oracles import brute_red, brute_solutions, brute_supporters

DATA = Path(__file__).parent / "data"


def single(lits, n=3):
    return Formula(n, len(lits), (tuple(lits),))


@pytest.mark.parametrize("sigma", list(itertools.product((0, 1), repeat=2)))
def test_tautological_clause_always_mixed(sigma):
    F = single((1, 2, -1), n=2)
    assert is_nae_solution(F, sigma)
    assert supporting_variable(F, sigma, 0) is None


@pytest.mark.parametrize("sigma", [(0,), (1,)])
def test_repeated_literal_clause_never_mixed(sigma):
    assert not is_nae_solution(single((1, 1, 1), n=1), sigma)


def test_all_true_clause_fails():
    assert not is_nae_solution(single((1, 2, 3)), (1, 1, 1))


def test_supporting_variable_examples():
    assert supporting_variable(single((1, 2, 3)), (1, 0, 0), 0) == 1
    assert supporting_variable(single((-1, 2, 3)), (1, 1, 1), 0) == 1


def test_support_requires_solution():
    with pytest.raises(PreconditionError):
        supporting_variable(single((1, 2, 3)), (1, 1, 1), 0)


def test_empty_formula_profile():
    F = Formula(4, 3, ())
    prof = support_profile(F, (0, 1, 0, 1))
    assert prof.n_free == 4 and prof.n_critical == 0


def test_single_clause_profile():
    prof = support_profile(single((1, 2, 3)), (1, 0, 0))
    assert list(prof.support_counts) == [1, 0, 0]
    assert prof.blocked_vars == frozenset({1})
    assert set(prof.free_vars) == {2, 3}
    assert prof.n_critical == 1


def test_corpus_profile_matches_flip_oracle():
    F = read_formula(DATA / "five_k3.naecnf")
    for sigma in brute_solutions(F.n, F.clauses):
        expected = brute_supporters(F.n, F.clauses, sigma)
        prof = support_profile(F, sigma)
        assert [sorted(s) for s in prof.supporters] == expected
        counts = [sum(x in s for s in expected) for x in range(1, F.n + 1)]
        assert list(prof.support_counts) == counts
        assert prof.n_critical == sum(1 for s in expected if s)


def test_two_supporters_only_with_two_distinct_variables():
    # (x1, x1, x2) with sigma = (1, 0): values (1, 1, 0); flipping either breaks it
    F = single((1, 1, 2), n=2)
    assert supporting_variables(F, (1, 0), 0) == [1, 2]


def test_beta_of_examples():
    p = RateParams(4, 3.0)
    n = 100
    scale = math.exp(-p.lam) * n
    assert beta_of(scale, p, n) == pytest.approx(0.0, abs=1e-15)
    assert beta_of(0, p, n) == 1.0
    assert beta_of(2 * scale, p, n) == pytest.approx(-1.0)


def test_distance_and_inversion():
    a = as_assignment((0, 1, 1, 0))
    assert hamming_distance(a, a) == 0
    assert hamming_distance(a, invert(a)) == 4


def test_corpus_inversion_symmetry():
    F = read_formula(DATA / "five_k3.naecnf")
    for sigma in itertools.product((0, 1), repeat=F.n):
        assert is_nae_solution(F, sigma) == is_nae_solution(F, invert(sigma))


def test_red_positions_match_positional_scan():
    F = read_formula(DATA / "five_k3.naecnf")
    for sigma in brute_solutions(F.n, F.clauses):
        assert red_positions(F, sigma).tolist() == brute_red(F.clauses, sigma)


def test_parse_round_trip_and_errors():
    F = read_formula(DATA / "five_k3.naecnf")
    assert parse_formula(format_formula(F)) == F
    with pytest.raises(DomainError):
        parse_formula("p naecnf 3 1 3\n1 2 0\n")
    with pytest.raises(DomainError):
        parse_formula("p naecnf 3 1 3\n1 2 4 0\n")
    with pytest.raises(DomainError):
        parse_formula("p naecnf 3 2 3\n1 2 3 0\n")
    with pytest.raises(DomainError):
        parse_formula("p naecnf 3 1 3\n1 x 3 0\n")


def test_formula_validation():
    with pytest.raises(DomainError):
        Formula(3, 3, ((1, 2),))
    with pytest.raises(DomainError):
        Formula(3, 3, ((1, 2, 0),))
    with pytest.raises(DomainError):
        Formula.from_literals(3, 3, [[(1, 1), (2, 2), (3, 1)]])


def test_assignment_validation():
    with pytest.raises(DomainError):
        as_assignment((0, 2, 1))
    with pytest.raises(DomainError):
        is_nae_solution(single((1, 2, 3)), (1, 0))


def test_rate_params():
    p = RateParams.from_rho(10, 0.3)
    assert p.rho == pytest.approx(0.3)
    assert p.lam == pytest.approx(10 * p.r / 511)
    assert RateParams.for_formula(Formula(4, 3, ((1, 2, 3), (2, 3, 4)))).r == 0.5
    with pytest.raises(DomainError):
        RateParams(4, -1.0)
