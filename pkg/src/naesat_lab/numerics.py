"""Small numeric helpers: bracketed bisection and stable log-sums."""
from __future__ import annotations

import math
from typing import Callable

from .errors import DomainError


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12, max_iter: int = 400) -> float:
    """Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.

    Iterates until the bracket is below ``tol`` or stops shrinking in
    floating point.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DomainError(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= tol:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def expand_bracket(f: Callable[[float], float], lo: float, hi: float, grow: float = 2.0,
                   max_steps: int = 200, fixed_hi: bool = False) -> tuple[float, float]:
    """Push ``lo`` downwards (and ``hi`` upwards unless fixed) until f changes sign."""
    flo, fhi = f(lo), f(hi)
    width = hi - lo
    for _ in range(max_steps):
        if (flo > 0) != (fhi > 0) or flo == 0 or fhi == 0:
            return lo, hi
        width *= grow
        lo = lo - width
        flo = f(lo)
        if not fixed_hi:
            hi = hi + width
            fhi = f(hi)
    raise DomainError("could not bracket a root")


def logsumexp(values) -> float:
    vals = [v for v in values if v != -math.inf]
    if not vals:
        return -math.inf
    top = max(vals)
    return top + math.log(sum(math.exp(v - top) for v in vals))


def entropy(x: float) -> float:
    """H(x) = -x ln x - (1-x) ln(1-x) with H(0) = H(1) = 0."""
    if x < 0 or x > 1:
        raise DomainError("entropy argument must lie in [0, 1]")
    out = 0.0
    if x > 0:
        out -= x * math.log(x)
    if x < 1:
        out -= (1 - x) * math.log1p(-x)
    return out


def xlogx(x: float) -> float:
    return 0.0 if x == 0 else x * math.log(x)
