"""Saddle-point local limit evaluation for sums of i.i.d. lattice variables.

For a probability generating function P and a target mean alpha, the
saddle point zeta solves zeta P'(zeta)/P(zeta) = alpha. Under the tilted
law with weights c_i z^i / P(z), zP'/P is the mean and
(ln P(z) - alpha ln z)'' = (var - mean + alpha) / z^2, so at the saddle
xi = var_zeta / zeta^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError
from .numerics import bisect

PGF_TOL = 1e-9


@dataclass(frozen=True)
class ProbabilityGeneratingFunction:
    """A law on the non-negative integers.

    kind is ``"finite"`` (coefficients given), ``"poisson"`` or
    ``"binomial"``. ``lower``/``upper`` truncate the named families and
    renormalise; a truncated Poisson with ``upper=None`` keeps its infinite
    tail.
    """

    kind: str
    coeffs: tuple[float, ...] = ()
    lam: float = 0.0
    N: int = 0
    p: float = 0.0
    lower: int = 0
    upper: int | None = None

    @classmethod
    def finite(cls, coeffs) -> "ProbabilityGeneratingFunction":
        c = tuple(float(x) for x in coeffs)
        if any(x < 0 for x in c) or not c:
            raise DomainError("coefficients must be non-negative and non-empty")
        if abs(sum(c) - 1) > PGF_TOL:
            raise DomainError(f"coefficients sum to {sum(c)}, expected P(1) = 1")
        return cls("finite", coeffs=c)

    @classmethod
    def poisson(cls, lam: float, lower: int = 0, upper: int | None = None):
        if lam <= 0:
            raise DomainError("Poisson mean must be positive")
        return cls("poisson", lam=float(lam), lower=lower, upper=upper)

    @classmethod
    def binomial(cls, N: int, p: float, lower: int = 0, upper: int | None = None):
        if N < 1 or not 0 < p < 1:
            raise DomainError("binomial needs N >= 1 and 0 < p < 1")
        return cls("binomial", N=int(N), p=float(p), lower=lower, upper=upper)

    # -- structure --------------------------------------------------------

    def _truncated(self) -> bool:
        return self.kind != "finite" and (self.lower > 0 or self.upper is not None)

    def _head_coeffs(self) -> np.ndarray:
        """Log-coefficients on the finite support used by truncated/finite laws."""
        if self.kind == "finite":
            c = np.array(self.coeffs)
            with np.errstate(divide="ignore"):
                return np.log(c)
        hi = self.upper if self.upper is not None else self.lower - 1
        i = np.arange(0, hi + 1)
        if self.kind == "poisson":
            lc = i * math.log(self.lam) - self.lam - gammaln(i + 1)
        else:
            i = i[i <= self.N]
            lc = (gammaln(self.N + 1) - gammaln(i + 1) - gammaln(self.N - i + 1)
                  + i * math.log(self.p) + (self.N - i) * math.log1p(-self.p))
        out = np.full(hi + 1, -np.inf)
        out[: lc.size] = lc
        return out

    def support_bounds(self) -> tuple[int, float]:
        """(T_0, T_infinity): the smallest and largest support points."""
        if self.kind == "finite":
            nz = [i for i, c in enumerate(self.coeffs) if c > 0]
            return nz[0], nz[-1]
        top = math.inf if self.kind == "poisson" else self.N
        if self.upper is not None:
            top = min(top, self.upper)
        return self.lower, top

    def is_aperiodic(self) -> bool:
        """gcd of differences between support points is 1."""
        if self.kind != "finite":
            lo, hi = self.support_bounds()
            return hi > lo
        nz = [i for i, c in enumerate(self.coeffs) if c > 0]
        if len(nz) < 2:
            return False
        return reduce(math.gcd, (i - nz[0] for i in nz[1:])) == 1

    # -- tilted moments ---------------------------------------------------

    def tilted(self, z: float) -> tuple[float, float, float]:
        """(ln P(z), mean, variance) of the law tilted by z^i."""
        if z <= 0:
            raise DomainError("z must be positive")
        lz = math.log(z)
        if self.kind == "poisson" and self.upper is None:
            lp_full = self.lam * (z - 1)
            mu = self.lam * z
            if self.lower == 0:
                return lp_full, mu, mu
            # subtract the head i < lower from P, P', P''
            i = np.arange(self.lower)
            lh = i * math.log(self.lam) - self.lam - gammaln(i + 1) + i * lz
            head = np.exp(lh - lp_full)
            m0 = 1 - head.sum()
            m1 = mu - (i * head).sum()
            m2 = mu * mu + mu - (i * i * head).sum()
            mean = m1 / m0
            return lp_full + math.log(m0) - self._log_norm(), mean, m2 / m0 - mean * mean
        if self.kind == "binomial" and not self._truncated():
            q = self.p * z / (1 - self.p + self.p * z)
            lp = self.N * math.log1p(self.p * (z - 1))
            return lp, self.N * q, self.N * q * (1 - q)
        lc = self._head_coeffs()
        i = np.arange(lc.size)
        lo = self.lower if self.kind != "finite" else 0
        w = lc[lo:] + i[lo:] * lz
        ii = i[lo:]
        lp = float(logsumexp(w))
        pw = np.exp(w - lp)
        mean = float((ii * pw).sum())
        var = float(((ii - mean) ** 2 * pw).sum())
        return lp - self._log_norm(), mean, var

    def _log_norm(self) -> float:
        if not self._truncated():
            return 0.0
        if self.kind == "poisson" and self.upper is None:
            i = np.arange(self.lower)
            head = np.exp(i * math.log(self.lam) - self.lam - gammaln(i + 1)).sum()
            return math.log1p(-head)
        lc = self._head_coeffs()
        return float(logsumexp(lc[self.lower:]))

    def log_eval(self, z: float) -> float:
        return self.tilted(z)[0]

    def mean(self) -> float:
        return self.tilted(1.0)[1]

    def variance(self) -> float:
        return self.tilted(1.0)[2]


def saddle_point(pgf: ProbabilityGeneratingFunction, alpha: float, tol: float = 1e-13) -> tuple[float, float]:
    """Solve zeta P'/P = alpha; returns (zeta, xi) with xi the second log-derivative."""
    t0, tinf = pgf.support_bounds()
    if not t0 < alpha < tinf:
        raise DomainError(f"alpha = {alpha} outside ({t0}, {tinf})")
    if not pgf.is_aperiodic():
        raise DomainError("generating function has periodic support")
    g = lambda u: pgf.tilted(math.exp(u))[1] - alpha
    lo, hi = -1.0, 1.0
    while g(lo) > 0:
        lo *= 2
    while g(hi) < 0:
        hi *= 2
    u = bisect(g, lo, hi, tol=tol)
    # one Newton step in u: d mean / du = variance
    _, mean, var = pgf.tilted(math.exp(u))
    if var > 0:
        u_new = u - (mean - alpha) / var
        if lo <= u_new <= hi:
            u = u_new
    zeta = math.exp(u)
    _, mean, var = pgf.tilted(zeta)
    xi = (var - mean + alpha) / zeta ** 2
    return zeta, xi


def log_local_limit_prob(pgf: ProbabilityGeneratingFunction, n: int, alpha: float) -> float:
    zeta, xi = saddle_point(pgf, alpha)
    lp = pgf.log_eval(zeta)
    return n * (lp - alpha * math.log(zeta)) - math.log(zeta) - 0.5 * math.log(2 * math.pi * n * xi)


def local_limit_prob(pgf: ProbabilityGeneratingFunction, n: int, alpha: float) -> float:
    """Approximate Pr[X_1 + ... + X_n = alpha n]."""
    return math.exp(log_local_limit_prob(pgf, n, alpha))


def gaussian_local_limit(pgf: ProbabilityGeneratingFunction, n: int, delta: float,
                         printed_sigma: bool = False) -> float:
    """(2 pi n sigma^2)^{-1/2} e^{-delta^2 n / 2}.

    With ``printed_sigma`` the root holds sigma instead of sigma^2, which
    reproduces the typeset normalisation.
    """
    var = pgf.variance()
    scale = math.sqrt(var) if printed_sigma else var
    return math.exp(-delta ** 2 * n / 2) / math.sqrt(2 * math.pi * n * scale)
