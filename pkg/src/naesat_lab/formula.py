"""Formulas, assignments and the per-assignment structural classifiers.

Variables are 1-based everywhere in the public API (``x1 .. xn``); numpy
arrays indexed by variable use slot ``x - 1``. Clause indices are 0-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError

Literal = tuple[int, int]


@dataclass(frozen=True)
class Formula:
    """A k-CNF read with NAE semantics.

    ``clauses`` holds signed DIMACS-style integers: ``+v`` is the literal
    x_v and ``-v`` its negation. Repeated variables inside a clause are
    allowed.
    """

    n: int
    k: int
    clauses: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("formula needs n >= 1")
        if self.k < 1:
            raise DomainError("clause width must be positive")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for i, c in enumerate(clauses):
            if len(c) != self.k:
                raise DomainError(f"clause {i} has {len(c)} literals, expected {self.k}")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise DomainError(f"clause {i} has literal {lit} outside 1..{self.n}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_literals(cls, n: int, k: int, clauses: Iterable[Iterable[Literal]]) -> "Formula":
        """Build from ``(variable, sign)`` pairs with sign in {+1, -1}."""
        out = []
        for c in clauses:
            row = []
            for var, sign in c:
                if sign not in (1, -1):
                    raise DomainError(f"sign must be +1 or -1, got {sign}")
                row.append(sign * var)
            out.append(tuple(row))
        return cls(n, k, tuple(out))

    @classmethod
    def from_arrays(cls, n: int, variables: np.ndarray, signs: np.ndarray) -> "Formula":
        """Build from an (m, k) array of 1-based variables and an array of +-1 signs."""
        variables = np.asarray(variables, dtype=np.int64)
        signs = np.asarray(signs, dtype=np.int64)
        if variables.ndim != 2:
            raise DomainError("variables must be a 2-d array")
        lits = variables * signs
        return cls(n, variables.shape[1], tuple(tuple(int(v) for v in row) for row in lits))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def literals(self, i: int) -> list[Literal]:
        return [(abs(l), 1 if l > 0 else -1) for l in self.clauses[i]]

    @cached_property
    def var_array(self) -> np.ndarray:
        """(m, k) array of 0-based variable slots."""
        a = np.abs(np.array(self.clauses, dtype=np.int64).reshape(self.m, self.k)) - 1
        a.setflags(write=False)
        return a

    @cached_property
    def neg_array(self) -> np.ndarray:
        """(m, k) uint8 array, 1 where the literal is negated."""
        a = (np.array(self.clauses, dtype=np.int64).reshape(self.m, self.k) < 0).astype(np.uint8)
        a.setflags(write=False)
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.var_array.ravel(), minlength=self.n)

    @cached_property
    def clause_groups(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per clause: (0-based variable, position bitmask) for each distinct variable."""
        groups = []
        for row in self.var_array:
            masks: dict[int, int] = {}
            for j, v in enumerate(row):
                masks[int(v)] = masks.get(int(v), 0) | (1 << j)
            groups.append(tuple(masks.items()))
        return tuple(groups)

    def density(self) -> float:
        return self.m / self.n


@dataclass(frozen=True)
class RateParams:
    """The analytic bundle (k, r) with derived rho and lambda."""

    k: int
    r: float

    def __post_init__(self):
        if self.k < 2:
            raise DomainError("k must be at least 2")
        if not self.r >= 0:
            raise DomainError("density r must be non-negative")

    @classmethod
    def from_rho(cls, k: int, rho: float) -> "RateParams":
        return cls(k, 2 ** (k - 1) * math.log(2) - rho)

    @classmethod
    def for_formula(cls, formula: Formula) -> "RateParams":
        # sampled instances are analysed at r = m/n, not at a target density
        return cls(formula.k, formula.m / formula.n)

    @property
    def rho(self) -> float:
        return 2 ** (self.k - 1) * math.log(2) - self.r

    @property
    def lam(self) -> float:
        return self.k * self.r / (2 ** (self.k - 1) - 1)

    def as_dict(self) -> dict:
        return {"k": self.k, "r": self.r, "rho": self.rho, "lambda": self.lam}


def as_assignment(values: Sequence[int] | np.ndarray, n: int | None = None) -> np.ndarray:
    """Validate and return a read-only uint8 array of 0/1 values."""
    a = np.array(values, dtype=np.int64).ravel()
    if a.size and (a.min() < 0 or a.max() > 1):
        raise DomainError("assignment values must be 0 or 1")
    if n is not None and a.size != n:
        raise DomainError(f"assignment has length {a.size}, formula has n = {n}")
    out = a.astype(np.uint8)
    out.setflags(write=False)
    return out


def hamming_distance(a, b) -> int:
    a = as_assignment(a)
    b = as_assignment(b)
    if a.size != b.size:
        raise DomainError("assignments have different lengths")
    return int(np.count_nonzero(a != b))


def invert(a) -> np.ndarray:
    return as_assignment(1 - as_assignment(a))


def literal_values(formula: Formula, sigma) -> np.ndarray:
    """(m, k) array of literal truth values under sigma."""
    s = as_assignment(sigma, formula.n)
    if formula.m == 0:
        return np.zeros((0, formula.k), dtype=np.uint8)
    return s[formula.var_array] ^ formula.neg_array


def is_nae_solution(formula: Formula, sigma) -> bool:
    vals = literal_values(formula, sigma)
    if vals.shape[0] == 0:
        return True
    return bool(np.all(vals.max(axis=1) != vals.min(axis=1)))


def _clause_pattern(vals_row: np.ndarray) -> int:
    return int(sum(int(v) << j for j, v in enumerate(vals_row)))


def _supporters_of(formula: Formula, i: int, pattern: int) -> list[int]:
    """Flip test on clause i given its literal-value bit pattern.

    Flipping x negates exactly the positions in x's mask; the clause becomes
    violated iff the result is all-zero or all-one, i.e. iff the pattern
    equals the mask or its complement.
    """
    full = (1 << formula.k) - 1
    return [v + 1 for v, mask in formula.clause_groups[i] if pattern == mask or pattern == full ^ mask]


def _require_solution(formula: Formula, sigma) -> np.ndarray:
    vals = literal_values(formula, sigma)
    if vals.shape[0] and not np.all(vals.max(axis=1) != vals.min(axis=1)):
        raise PreconditionError("assignment is not an NAE-solution of the formula")
    return vals


def supporting_variables(formula: Formula, sigma, clause_index: int) -> list[int]:
    """All variables whose flip violates the clause (at most two)."""
    if not 0 <= clause_index < formula.m:
        raise DomainError(f"clause index {clause_index} out of range")
    vals = _require_solution(formula, sigma)
    return _supporters_of(formula, clause_index, _clause_pattern(vals[clause_index]))


def supporting_variable(formula: Formula, sigma, clause_index: int) -> int | None:
    """The variable supporting the clause, or None if it is not critical.

    With repeated variables two variables can support the same clause, e.g.
    (x1 v x1 v x2) under (1, 0); the smaller index is returned then.
    """
    sup = supporting_variables(formula, sigma, clause_index)
    return min(sup) if sup else None


@dataclass(frozen=True)
class SupportProfile:
    support_counts: np.ndarray
    other_occurrences: np.ndarray
    critical_clauses: frozenset[int]
    free_vars: frozenset[int]
    blocked_vars: frozenset[int]
    supporters: tuple[tuple[int, ...], ...]

    @property
    def n_free(self) -> int:
        return len(self.free_vars)

    @property
    def n_critical(self) -> int:
        return len(self.critical_clauses)


def support_profile(formula: Formula, sigma) -> SupportProfile:
    vals = _require_solution(formula, sigma)
    n = formula.n
    counts = np.zeros(n, dtype=np.int64)
    critical = []
    supporters = []
    for i in range(formula.m):
        sup = tuple(_supporters_of(formula, i, _clause_pattern(vals[i])))
        supporters.append(sup)
        if sup:
            critical.append(i)
            for x in sup:
                counts[x - 1] += 1
    counts.setflags(write=False)
    other = formula.degrees - counts
    other.setflags(write=False)
    blocked = frozenset(int(x) + 1 for x in np.flatnonzero(counts))
    free = frozenset(range(1, n + 1)) - blocked
    return SupportProfile(counts, other, frozenset(critical), free, blocked, tuple(supporters))


def beta_of(profile: SupportProfile | float, params: RateParams, n: int) -> float:
    """beta = 1 - |free| / (e^{-lambda} n). Accepts a profile or a free count."""
    if n <= 0:
        raise DomainError("n must be positive")
    free = profile if isinstance(profile, (int, float, np.number)) else profile.n_free
    return 1.0 - float(free) / (math.exp(-params.lam) * n)


def red_positions(formula: Formula, sigma) -> np.ndarray:
    """(m, k) boolean array; (i, j) is red iff literal j is the positional minority.

    This is the per-occurrence colouring used by pair statistics: the value
    at position j differs from each of the other k-1 literal values. For
    clauses with distinct variables it coincides with the flip test.
    """
    vals = literal_values(formula, sigma).astype(np.int64)
    if vals.shape[0] == 0:
        return np.zeros((0, formula.k), dtype=bool)
    ones = vals.sum(axis=1, keepdims=True)
    k = formula.k
    # position j is the minority iff all others hold the opposite value
    return ((vals == 1) & (ones == 1)) | ((vals == 0) & (ones == k - 1))


# -- text format ---------------------------------------------------------

def format_formula(formula: Formula) -> str:
    lines = [f"p naecnf {formula.n} {formula.m} {formula.k}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in formula.clauses]
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DomainError(f"line {lineno}: expected integers") from None


def parse_formula(text: str) -> Formula:
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 5 or parts[1] != "naecnf":
                raise DomainError(f"line {lineno}: bad header {line!r}")
            header = tuple(_ints(parts[2:], lineno))
            continue
        if header is None:
            raise DomainError(f"line {lineno}: clause before header")
        nums = _ints(line.split(), lineno)
        if not nums or nums[-1] != 0:
            raise DomainError(f"line {lineno}: clause must end with 0")
        lits = nums[:-1]
        if len(lits) != header[2]:
            raise DomainError(f"line {lineno}: expected {header[2]} literals, got {len(lits)}")
        clauses.append(tuple(lits))
    if header is None:
        raise DomainError("missing 'p naecnf' header")
    n, m, k = header
    if len(clauses) != m:
        raise DomainError(f"header declares {m} clauses, found {len(clauses)}")
    return Formula(n, k, tuple(clauses))


def read_formula(path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_formula(fh.read())


def write_formula(formula: Formula, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_formula(formula))
