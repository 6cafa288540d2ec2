"""Random formulas: uniform, degree sequences, and the configuration model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .formula import Formula, RateParams
from .rng import make_rng


def sample_uniform_formula(n: int, m: int, k: int, seed: int) -> Formula:
    """m clauses, each literal drawn uniformly from the 2n literals."""
    if n < 1 or m < 0 or k < 3:
        raise DomainError("need n >= 1, m >= 0, k >= 3")
    rng = make_rng(seed, "uniform", n, m, k)
    variables = rng.integers(1, n + 1, size=(m, k))
    signs = np.where(rng.integers(0, 2, size=(m, k)) == 1, 1, -1)
    return Formula.from_arrays(n, variables.reshape(m, k), signs.reshape(m, k))


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.degrees, dtype=np.int64)


def multinomial_split(total: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Equiprobable multinomial via sequential binomial splits.

    Bin i receives Bin(remaining, 1/(n - i)) balls, which is exact and O(n).
    """
    out = np.zeros(n, dtype=np.int64)
    remaining = total
    for i in range(n - 1):
        if remaining == 0:
            break
        d = int(rng.binomial(remaining, 1.0 / (n - i)))
        out[i] = d
        remaining -= d
    out[n - 1] += remaining
    return out


def sample_degree_sequence(n: int, m: int, k: int, seed: int) -> DegreeSequence:
    """Degree sequence of a uniform formula: km balls into n equiprobable bins.

    This is the law of n i.i.d. Poisson(kr) variables conditioned on their
    sum being km.
    """
    if n < 1 or m < 0 or k < 1:
        raise DomainError("need n >= 1, m >= 0, k >= 1")
    rng = make_rng(seed, "degseq", n, m, k)
    return DegreeSequence(tuple(int(d) for d in multinomial_split(k * m, n, rng)))


@dataclass(frozen=True)
class ConfigurationDraw:
    """pi[b] is the flat position (i * k + j) of ball b; balls are grouped by variable."""

    pi: tuple[int, ...]
    signs: tuple[int, ...]


def balls_of(degseq: DegreeSequence) -> np.ndarray:
    """Owner variable (1-based) of each ball, balls listed variable by variable."""
    return np.repeat(np.arange(1, degseq.n + 1), degseq.as_array())


def formula_from_configuration(degseq: DegreeSequence, m: int, k: int, draw: ConfigurationDraw) -> Formula:
    owners = balls_of(degseq)
    slots = np.empty(m * k, dtype=np.int64)
    slots[np.asarray(draw.pi, dtype=np.int64)] = owners
    signs = np.asarray(draw.signs, dtype=np.int64)
    return Formula.from_arrays(degseq.n, slots.reshape(m, k), signs.reshape(m, k))


def sample_configuration(degseq: DegreeSequence, m: int, k: int, seed: int) -> ConfigurationDraw:
    if degseq.total != k * m:
        raise DomainError(f"degree sum {degseq.total} differs from km = {k * m}")
    rng = make_rng(seed, "configuration", degseq.n, m, k)
    pi = rng.permutation(k * m)
    signs = np.where(rng.integers(0, 2, size=k * m) == 1, 1, -1)
    return ConfigurationDraw(tuple(int(p) for p in pi), tuple(int(s) for s in signs))


def sample_configuration_formula(degseq: DegreeSequence, m: int, k: int, seed: int) -> Formula:
    """Formula with the given degrees, uniform up to the multiplicity prod d_x!."""
    return formula_from_configuration(degseq, m, k, sample_configuration(degseq, m, k, seed))


@dataclass(frozen=True)
class DegreeStats:
    counts: dict[int, int]
    alpha: float
    tail_count: int
    tail_volume: int
    max_degree: int
    sum_squares: int
    tail_count_ok: bool
    tail_volume_ok: bool
    sum_squares_ok: bool


def degree_sequence_stats(degseq: DegreeSequence, params: RateParams, alpha: float) -> DegreeStats:
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    d = degseq.as_array()
    n = d.size
    kr = params.k * params.r
    counts = {int(i): int(c) for i, c in enumerate(np.bincount(d)) if c}
    tail = np.abs(d - kr) >= alpha * math.sqrt(kr)
    tail_count = int(tail.sum())
    tail_volume = int(d[tail].sum())
    bound = 2 * math.exp(-alpha ** 2 / 2)
    sq = int((d * d).sum())
    return DegreeStats(
        counts=counts,
        alpha=alpha,
        tail_count=tail_count,
        tail_volume=tail_volume,
        max_degree=int(d.max()) if n else 0,
        sum_squares=sq,
        tail_count_ok=tail_count <= bound * n,
        tail_volume_ok=tail_volume <= bound * kr ** 2 * n,
        sum_squares_ok=sq <= 10 * kr ** 2 * n,
    )


def volume_tail_check(degseq: DegreeSequence, params: RateParams) -> tuple[bool, int | None]:
    """Check Vol(S) <= 10 max{kr|S|, |S| ln(n/|S|)} on the worst S of each size.

    The worst S of size s holds the s largest degrees. Returns (ok, first
    violating size or None).
    """
    d = np.sort(degseq.as_array())[::-1]
    n = d.size
    kr = params.k * params.r
    vol = np.cumsum(d)
    s = np.arange(1, n + 1)
    bound = 10 * np.maximum(kr * s, s * np.log(n / s))
    bad = np.flatnonzero(vol > bound)
    if bad.size:
        return False, int(s[bad[0]])
    return True, None
