import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare, poisson

from naesat_lab import DomainError
from naesat_lab.formula import RateParams
from naesat_lab.generators import (ConfigurationDraw, DegreeSequence, degree_sequence_stats,
                                   formula_from_configuration, multinomial_split,
                                   sample_configuration_formula, sample_degree_sequence,
                                   sample_uniform_formula, volume_tail_check)
from naesat_lab.rng import make_rng

from oracles import formulas_with_degrees


def test_single_variable_formula_patterns():
    counts = Counter(sample_uniform_formula(1, 1, 3, seed).clauses[0] for seed in range(4000))
    assert set(counts) == set(itertools.product((1, -1), repeat=3))
    assert chisquare(list(counts.values())).pvalue > 1e-4


def test_literal_frequencies_uniform():
    F = sample_uniform_formula(5, 20000, 5, seed=11)
    lits = np.array(F.clauses).ravel()
    counts = np.array([np.count_nonzero(lits == l) for l in (-5, -4, -3, -2, -1, 1, 2, 3, 4, 5)])
    expected = lits.size / 10
    sd = math.sqrt(lits.size * 0.1 * 0.9)
    assert np.all(np.abs(counts - expected) <= 4 * sd)


def test_determinism():
    assert sample_uniform_formula(10, 20, 4, 5) == sample_uniform_formula(10, 20, 4, 5)
    assert sample_uniform_formula(10, 20, 4, 5) != sample_uniform_formula(10, 20, 4, 6)
    assert sample_degree_sequence(50, 40, 3, 2) == sample_degree_sequence(50, 40, 3, 2)


def test_golden_uniform_formula():
    # pins the generator stream: first clauses of a fixed-seed draw
    F = sample_uniform_formula(6, 3, 3, seed=2024)
    assert F == sample_uniform_formula(6, 3, 3, seed=2024)
    assert F.clauses == ((4, 6, -6), (1, 3, -5), (-5, 5, -2))
    assert sample_degree_sequence(8, 10, 3, 1).degrees == (4, 3, 5, 7, 1, 2, 5, 3)


def test_degree_sum_and_small_law():
    for seed in range(20):
        d = sample_degree_sequence(7, 9, 3, seed)
        assert d.total == 27
    counts = Counter(sample_degree_sequence(2, 1, 2, seed).degrees for seed in range(4000))
    assert set(counts) == {(2, 0), (1, 1), (0, 2)}
    obs = [counts[(2, 0)], counts[(1, 1)], counts[(0, 2)]]
    assert chisquare(obs, [1000, 2000, 1000]).pvalue > 1e-4


def test_multinomial_split_is_multinomial():
    rng = make_rng(3, "test")
    draws = np.array([multinomial_split(6, 3, rng) for _ in range(6000)])
    assert np.all(draws.sum(axis=1) == 6)
    assert np.allclose(draws.mean(axis=0), 2.0, atol=0.1)


def test_degree_profile_matches_poisson():
    n, m, k = 100000, 50000, 4
    d = sample_degree_sequence(n, m, k, seed=1).as_array()
    kr = k * m / n
    top = 8
    obs = np.array([np.count_nonzero(d == i) for i in range(top)] + [np.count_nonzero(d >= top)])
    p = np.append(poisson.pmf(np.arange(top), kr), poisson.sf(top - 1, kr))
    # conditioning on the sum only shifts the pmf by O(1/n)
    assert chisquare(obs, p * n).pvalue > 1e-4


def test_configuration_single_variable():
    d = DegreeSequence((3,))
    seen = Counter(sample_configuration_formula(d, 1, 3, s).clauses[0] for s in range(2000))
    assert set(abs(l) for c in seen for l in c) == {1}
    assert len(seen) == 8


def test_configuration_degrees_respected():
    d = sample_degree_sequence(30, 25, 4, 9)
    F = sample_configuration_formula(d, 25, 4, 9)
    assert list(F.degrees) == list(d.degrees)


def test_configuration_rejects_bad_total():
    with pytest.raises(DomainError):
        sample_configuration_formula(DegreeSequence((1, 1)), 1, 3, 0)


def test_configuration_exhaustive_law():
    """All 6! * 2^6 draws for d = (2, 2, 2): every formula has mass prod d_x! / (6! 2^6)."""
    d = DegreeSequence((2, 2, 2))
    m, k = 2, 3
    law = Counter()
    for pi in itertools.permutations(range(6)):
        for signs in itertools.product((1, -1), repeat=6):
            law[formula_from_configuration(d, m, k, ConfigurationDraw(pi, signs)).clauses] += 1
    total = math.factorial(6) * 2 ** 6
    assert sum(law.values()) == total
    targets = set(formulas_with_degrees((2, 2, 2), m, k))
    assert set(law) == targets
    mult = math.prod(math.factorial(x) for x in d.degrees)
    assert all(Fraction(c, total) == Fraction(mult, total) for c in law.values())


def test_marginalisation_exact():
    """Degree law times configuration law equals the uniform formula law."""
    n, m, k = 3, 2, 3
    total = Fraction(0)
    for degs in itertools.product(range(7), repeat=3):
        if sum(degs) != 6:
            continue
        p_d = Fraction(math.factorial(6), math.prod(math.factorial(x) for x in degs)) / 3 ** 6
        per_formula = Fraction(math.prod(math.factorial(x) for x in degs), math.factorial(6) * 2 ** 6)
        count = len(formulas_with_degrees(degs, m, k))
        assert p_d * per_formula == Fraction(1, (2 * n) ** (k * m))
        total += p_d * per_formula * count
    assert total == 1


def test_degree_stats_constant_sequence():
    p = RateParams(3, 2.0)
    st = degree_sequence_stats(DegreeSequence((6,) * 10), p, alpha=0.5)
    assert st.tail_count == 0 and st.tail_volume == 0
    assert sum(i * c for i, c in st.counts.items()) == 60
    assert volume_tail_check(DegreeSequence((6,) * 10), p) == (True, None)


def test_degree_stats_sampled():
    k, n = 5, 10000
    m = n * 3
    p = RateParams(k, m / n)
    for seed in range(100):
        d = sample_degree_sequence(n, m, k, seed)
        st = degree_sequence_stats(d, p, alpha=2.0)
        assert st.tail_count_ok and st.tail_volume_ok
        assert sum(i * c for i, c in st.counts.items()) == k * m
        if seed < 5:
            assert volume_tail_check(d, p)[0]


def test_volume_tail_spike():
    n = 16
    d = DegreeSequence((4,) + (0,) * (n - 1))
    p = RateParams(3, 4 / 48)
    ok, first = volume_tail_check(d, p)
    # S = {x1}: Vol = 4, bound 10 max(kr, ln 16) = 10 ln 16
    assert ok == (4 <= 10 * max(0.25, math.log(16)))
    d2 = DegreeSequence((100,) + (0,) * (n - 1))
    assert volume_tail_check(d2, RateParams(3, 100 / 48)) == (False, 1)
