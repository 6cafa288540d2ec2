"""Monte Carlo estimates of E[Z] and E[Z_beta] over uniform formulas."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import DomainError
from .formula import Formula
from .occupancy import clause_support_law, support_occupancy_pmf
from .rng import make_rng
from .solutions import enumerate_solutions


def trial_formula(n: int, m: int, k: int, seed: int, trial: int) -> Formula:
    rng = make_rng(seed, "montecarlo", n, m, k, trial)
    variables = rng.integers(1, n + 1, size=(m, k))
    signs = np.where(rng.integers(0, 2, size=(m, k)) == 1, 1, -1)
    return Formula.from_arrays(n, variables, signs)


def _one_trial(args) -> np.ndarray:
    """Counts of solutions by free-variable count for one formula."""
    n, m, k, seed, t = args
    sols = enumerate_solutions(trial_formula(n, m, k, seed, t))
    if not len(sols):
        return np.zeros(n + 1, dtype=np.int64)
    return np.bincount(sols.profiles.free_count, minlength=n + 1)


@dataclass(frozen=True)
class MonteCarloResult:
    n: int
    m: int
    k: int
    trials: int
    free_counts: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.free_counts.sum(axis=1)

    def mean_ci(self, values: np.ndarray, level: float = 0.99) -> tuple[float, float, float, float]:
        """(mean, standard error, lo, hi) with a normal interval from the sample variance."""
        mean = float(values.mean())
        se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.inf
        z = norm.ppf(0.5 + level / 2)
        return mean, se, float(mean - z * se), float(mean + z * se)

    def window_counts(self, lo: int, hi: int) -> np.ndarray:
        """Per-formula number of solutions whose free count lies in [lo, hi]."""
        return self.free_counts[:, lo:hi + 1].sum(axis=1)


def run_montecarlo(n: int, m: int, k: int, trials: int, seed: int, threads: int = 1) -> MonteCarloResult:
    if trials < 1:
        raise DomainError("trials must be at least 1")
    jobs = [(n, m, k, seed, t) for t in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_one_trial, jobs))
    else:
        rows = [_one_trial(j) for j in jobs]
    return MonteCarloResult(n, m, k, trials, np.vstack(rows))


def expected_z(n: int, m: int, k: int) -> float:
    return 2.0 ** n * (1 - 2.0 ** (1 - k)) ** m


def expected_z_window(n: int, m: int, k: int, lo: int, hi: int) -> float:
    """Exact E[#solutions with free count in [lo, hi]].

    Given that sigma is a solution the clauses are independent, each with a
    no/one/two-supporter law, so E[Z_window] = E[Z] * Pr[free count in window].
    """
    _, q1, q2 = clause_support_law(n, k)
    pmf = support_occupancy_pmf(n, m, float(q1), float(q2))
    return expected_z(n, m, k) * float(pmf[lo:hi + 1].sum())

