"""Command-line front end.

Every subcommand prints one JSON record (schema 1) or CSV rows. Exit codes:
0 success, 1 I/O error, 2 domain error, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
from scipy.stats import binom, poisson

from . import __version__
from .errors import DomainError
from .formula import RateParams, format_formula, read_formula
from .generators import (DegreeSequence, degree_sequence_stats, sample_configuration_formula,
                         sample_degree_sequence, sample_uniform_formula, volume_tail_check)
from .llt import ProbabilityGeneratingFunction, local_limit_prob, saddle_point
from .montecarlo import expected_z, expected_z_window, run_montecarlo
from .occupancy import (OccupancyModel, capacitated_conditioned_prob, capacitated_throw_mc,
                        empty_bins_exact)
from .psi import OverlapVector, ProfileFractions, psi_breakdown
from .rates import BETA_DROPPED, beta_exponents, pair_exponent, thresholds
from .rng import RNG_ALGORITHM, make_rng
from .solutions import (cluster_decomposition, enumerate_solutions, is_beta_good, mean_distance_ci,
                        pair_distance_histogram, pair_profile_stats, rigid_variables, sp_sample,
                        uniform_sample)

SCHEMA = 1
EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 64
MAX_GRID = 10 ** 6


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def build_id() -> str:
    """Version plus a digest of the package sources."""
    h = hashlib.sha1()
    for path in sorted(Path(__file__).parent.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return f"{__version__}+{h.hexdigest()[:12]}"


def _plain(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, int(os.environ.get("NAESAT_LAB_THREADS", "1")))


def _grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise DomainError("a scan needs at least 2 steps")
    if steps > MAX_GRID:
        raise DomainError(f"grid of {steps} points exceeds the limit {MAX_GRID} "
                          f"(about {steps * 60 / 1e6:.0f} MB of CSV)")
    g = np.linspace(lo, hi, steps)
    g[-1] = hi
    return g


def _m_of(args) -> int:
    if args.m is not None:
        return args.m
    if args.r is None:
        raise DomainError("give --m or --r")
    return math.ceil(args.r * args.n)


# -- subcommands ------------------------------------------------------------
# Each returns (params, seeds, results, dropped, rows) where rows is the CSV
# table (header, rows) or None, or a raw text payload for gen/degseq.

def cmd_gen(args):
    m = _m_of(args)
    if args.degseq:
        d = DegreeSequence(tuple(int(x) for x in Path(args.degseq).read_text().split()))
        F = sample_configuration_formula(d, m, args.k, args.seed)
    else:
        F = sample_uniform_formula(args.n, m, args.k, args.seed)
    return format_formula(F)


def cmd_degseq(args):
    m = _m_of(args)
    d = sample_degree_sequence(args.n, m, args.k, args.seed)
    params = RateParams(args.k, m / args.n)
    stats = degree_sequence_stats(d, params, args.alpha)
    ok, first_bad = volume_tail_check(d, params)
    results = {"stats": stats, "volume_tail_ok": ok, "volume_tail_first_violation": first_bad}
    text = "\n".join(str(x) for x in d.degrees) + "\n"
    return text, ({"n": args.n, "m": m, "k": args.k, "alpha": args.alpha}, [args.seed], results)


def _beta_histogram(sols, params):
    if not len(sols):
        return []
    free = sols.profiles.free_count
    vals, counts = np.unique(free, return_counts=True)
    scale = math.exp(-params.lam) * sols.n
    return [{"free": int(v), "beta": 1 - v / scale, "count": int(c)} for v, c in zip(vals, counts)]


def _load(args):
    F = read_formula(args.infile)
    return F, RateParams.for_formula(F)


def cmd_count(args):
    F, params = _load(args)
    sols = enumerate_solutions(F, cap=args.cap)
    res = {"n": F.n, "m": F.m, "k": F.k, "Z": len(sols),
           "beta_histogram": _beta_histogram(sols, params),
           "lambda_n_rounded": int(round(params.lam * F.n))}
    table = (["free", "beta", "count"], [[h["free"], h["beta"], h["count"]] for h in res["beta_histogram"]])
    return {"in": args.infile, "cap": args.cap}, [], res, BETA_DROPPED, table


def cmd_clusters(args):
    F, params = _load(args)
    sols = enumerate_solutions(F, cap=args.cap)
    res = {"n": F.n, "m": F.m, "k": F.k, "Z": len(sols),
           "beta_histogram": _beta_histogram(sols, params)}
    if len(sols):
        cd = cluster_decomposition(sols, args.theta)
        hist = pair_distance_histogram(sols, args.theta)
        res.update(N_balls=cd.n_balls, N_components=cd.n_components, radius=cd.radius,
                   dichotomy_mass=hist.dichotomy_mass)
        table = (["distance", "count"], [[d, int(c)] for d, c in enumerate(hist.counts)])
    else:
        res.update(N_balls=0, N_components=0, radius=None, dichotomy_mass=0.0)
        table = (["distance", "count"], [])
    return {"in": args.infile, "theta": args.theta}, [], res, (), table


def cmd_rigidity(args):
    F, params = _load(args)
    sols = enumerate_solutions(F, cap=args.cap)
    if not len(sols):
        raise DomainError("formula has no solutions")
    if not 0 <= args.index < len(sols):
        raise DomainError(f"solution index {args.index} outside [0, {len(sols)})")
    sigma = sols.assignment(args.index)
    rr = rigid_variables(sols, sigma, args.xi, args.theta)
    good = is_beta_good(F, sigma, params, slack_multiplier=args.good_slack, solutions=sols)
    res = {"sigma": "".join(map(str, sigma)), "rigid": rr.rigid, "cluster_rigid": rr.cluster_rigid,
           "radius": rr.radius, "beta_good": good}
    table = (["variable", "rigid", "cluster_rigid"],
             [[x, int(x in rr.rigid), int(x in rr.cluster_rigid)] for x in range(1, F.n + 1)])
    return {"in": args.infile, "xi": args.xi, "theta": args.theta, "index": args.index,
            "good_slack": args.good_slack}, [], res, (), table


def cmd_pairs(args):
    F, params = _load(args)
    sols = enumerate_solutions(F, cap=args.cap)
    hist = pair_distance_histogram(sols, args.theta)
    rng = make_rng(args.seed, "pairs")
    good = 0
    sampled = min(args.trials, len(sols) * len(sols)) if len(sols) else 0
    for _ in range(sampled):
        i, j = rng.integers(0, len(sols), size=2)
        good += pair_profile_stats(F, sols.assignment(i), sols.assignment(j), params).good_pair
    res = {"n": F.n, "m": F.m, "k": F.k, "seed": args.seed, "Z": len(sols), "pairs": hist.pairs,
           "dichotomy_mass": hist.dichotomy_mass, "radius": hist.radius, "far_edge": hist.far_edge,
           "good_pair_fraction": good / sampled if sampled else None, "sampled_pairs": sampled}
    table = (["distance", "count"], [[d, int(c)] for d, c in enumerate(hist.counts)])
    return {"in": args.infile, "theta": args.theta, "trials": args.trials}, [args.seed], res, (), table


def cmd_sp_sample(args):
    F, params = _load(args)
    sols = enumerate_solutions(F, cap=args.cap)
    cd = cluster_decomposition(sols, args.theta)
    sp = sp_sample(cd, args.seed, args.trials)
    un = uniform_sample(sols, args.seed, args.trials)
    res = {"N_components": cd.n_components, "samples": ["".join(map(str, s)) for s in sp[:args.show]],
           "sp_mean_distance_ci": mean_distance_ci(sp), "uniform_mean_distance_ci": mean_distance_ci(un)}
    table = (["sample"], [["".join(map(str, s))] for s in sp])
    return {"in": args.infile, "theta": args.theta, "trials": args.trials}, [args.seed], res, (), table


def cmd_thresholds(args):
    tb = thresholds(args.k)
    d = _plain(tb)
    cols = [k for k, v in d.items() if not isinstance(v, (list, str))]
    return {"k": args.k}, [], tb, tb.asymptotic_terms_dropped, (cols, [[d[c] for c in cols]])


def cmd_eta_scan(args):
    params = RateParams(args.k, args.r)
    rows = []
    for b in _grid(args.beta_min, args.beta_max, args.steps):
        e = beta_exponents(params, float(b))
        rows.append([e.beta, e.f, e.h, e.g, e.eta])
    cols = ["beta", "f", "h", "g", "eta"]
    res = {"rows": [dict(zip(cols, r)) for r in rows]}
    return params.as_dict() | {"beta_min": args.beta_min, "beta_max": args.beta_max, "steps": args.steps}, \
        [], res, BETA_DROPPED, (cols, rows)


def cmd_pair_exponent(args):
    params = RateParams(args.k, args.r)
    lo = args.alpha_min if args.alpha_min is not None else float(args.k) ** -6
    rows = [[float(a), pair_exponent(params, float(a))] for a in _grid(lo, 0.5, args.alpha_grid)]
    res = {"rows": [{"alpha": a, "pair_exponent": v} for a, v in rows]}
    return params.as_dict() | {"alpha_min": lo, "alpha_grid": args.alpha_grid}, [], res, (), \
        (["alpha", "pair_exponent"], rows)


def cmd_psi_eval(args):
    point = json.loads(Path(args.params).read_text())
    try:
        params = RateParams(int(point["k"]), float(point["r"]))
        fr = ProfileFractions(**{f: float(point["fractions"][f]) for f in
                                 ("g_rr", "g_rb", "g_br", "g_bb", "gamma")})
        ov_raw = point["overlap"]
        ov = OverlapVector(*(None if ov_raw.get(f) is None else float(ov_raw[f])
                             for f in ("a_rr", "a_rb", "a_br", "a_bb", "a_gamma")))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed parameter file: {exc}") from exc
    opts = {k: point[k] for k in ("alpha_form", "bb_form", "bb_count") if k in point}
    br = psi_breakdown(params, fr, ov, **opts)
    d = _plain(br)
    return {"params_file": args.params, "input": point}, [], br, (), (list(d), [list(d.values())])


def _capacities(args):
    if args.capacities is None:
        return None
    if args.capacities == "poisson-sample":
        if args.k is None or args.r is None:
            raise DomainError("poisson-sample capacities need --k and --r")
        rng = make_rng(args.seed, "capacities", args.bins)
        return tuple(float(c) for c in rng.poisson(args.k * args.r, size=args.bins))
    if args.capacities == "inf":
        return (math.inf,) * args.bins
    caps = tuple(float(x) for x in Path(args.capacities).read_text().split())
    if len(caps) != args.bins:
        raise DomainError(f"capacity file lists {len(caps)} bins, expected {args.bins}")
    return caps


def cmd_occupancy(args):
    balls = args.balls if args.balls is not None else args.total
    if balls is None:
        raise DomainError("give --balls or --total")
    caps = _capacities(args)
    params = {"bins": args.bins, "balls": balls, "capacities": args.capacities, "hard_cap": args.hard_cap,
              "target_empty": args.target_empty, "mode": args.mode, "trials": args.trials}
    if caps is None:
        pmf = empty_bins_exact(args.bins, balls)
        res = {"empty_pmf": pmf}
        if args.target_empty is not None:
            res["prob"] = float(pmf[args.target_empty]) if 0 <= args.target_empty <= args.bins else 0.0
        return params, [], res, (), (["empty", "prob"], [[e, float(p)] for e, p in enumerate(pmf)])
    hard = math.inf if args.hard_cap is None else args.hard_cap
    model = OccupancyModel(caps, hard, args.slot_prob, balls, args.poisson_mean)
    if args.mode == "mc":
        st = capacitated_throw_mc(model, args.trials, args.seed)
        rows = [[e, p, *st.empty_ci[e]] for e, p in sorted(st.empty_pmf.items())]
        return params, [args.seed], st, (), (["empty", "prob", "ci_lo", "ci_hi"], rows)
    if args.target_empty is None:
        raise DomainError("exact mode needs --target-empty")
    cp = capacitated_conditioned_prob(model, args.target_empty)
    res = _plain(cp) | {"prob": cp.prob}
    return params, [args.seed], res, (), (list(res), [list(res.values())])


def cmd_montecarlo(args):
    m = _m_of(args)
    mc = run_montecarlo(args.n, m, args.k, args.trials, args.seed, _threads(args))
    mean, se, lo, hi = mc.mean_ci(mc.z)
    ez = expected_z(args.n, m, args.k)
    windows = []
    edges = list(range(0, args.n + 2, max(1, args.window)))
    if edges[-1] != args.n + 1:
        edges.append(args.n + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        w = mc.window_counts(a, b - 1)
        wm, wse, _, _ = mc.mean_ci(w)
        exact = expected_z_window(args.n, m, args.k, a, b - 1)
        windows.append({"free_lo": a, "free_hi": b - 1, "mean": wm, "se": wse, "exact": exact,
                        "z_score": (wm - exact) / wse if wse > 0 else None})
    res = {"n": args.n, "m": m, "k": args.k, "trials": args.trials, "mean_Z": mean, "se_Z": se,
           "ci99_Z": [lo, hi], "expected_Z": ez, "within_ci": lo <= ez <= hi, "windows": windows}
    cols = ["free_lo", "free_hi", "mean", "se", "exact", "z_score"]
    return {"n": args.n, "m": m, "k": args.k, "trials": args.trials, "window": args.window}, \
        [args.seed], res, (), (cols, [[w[c] for c in cols] for w in windows])


def _pgf(args):
    if args.pgf == "poisson":
        return ProbabilityGeneratingFunction.poisson(args.lam, args.lower, args.upper)
    if args.pgf == "binomial":
        return ProbabilityGeneratingFunction.binomial(args.N, args.p, args.lower, args.upper)
    if args.coeffs is None:
        raise DomainError("finite PGF needs --coeffs")
    return ProbabilityGeneratingFunction.finite(float(x) for x in args.coeffs.split(","))


def cmd_llt(args):
    pgf = _pgf(args)
    zeta, xi = saddle_point(pgf, args.alpha)
    approx = local_limit_prob(pgf, args.n, args.alpha)
    target = args.alpha * args.n
    exact = None
    if pgf.kind == "poisson" and pgf.lower == 0 and pgf.upper is None and float(target).is_integer():
        exact = float(poisson.pmf(int(target), args.n * pgf.lam))
    elif pgf.kind == "binomial" and pgf.lower == 0 and pgf.upper is None and float(target).is_integer():
        exact = float(binom.pmf(int(target), args.n * pgf.N, pgf.p))
    res = {"zeta": zeta, "xi": xi, "local_limit_prob": approx, "exact": exact,
           "relative_error": abs(approx - exact) / exact if exact else None}
    return {"pgf": args.pgf, "lam": args.lam, "N": args.N, "p": args.p, "coeffs": args.coeffs,
            "lower": args.lower, "upper": args.upper, "n": args.n, "alpha": args.alpha}, [], res, \
        ("(1+o(1)) factor of the local limit theorem",), (list(res), [list(res.values())])


# -- parser -----------------------------------------------------------------

def _common(p, seed=True, threads=False):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write to this file instead of stdout")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $NAESAT_LAB_THREADS or 1)")


def _size(p, need_k=True):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--k", type=int, required=need_k)


def _infile(p):
    p.add_argument("--in", dest="infile", required=True, help="formula in p naecnf format")
    p.add_argument("--cap", type=int, default=28, help="largest n to enumerate")
    p.add_argument("--theta", type=float, default=0.01)


def make_parser() -> Parser:
    parser = Parser(prog="naesat-lab", description="Random k-NAESAT rate functions and experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("gen", help="sample a formula")
    _size(p)
    p.add_argument("--degseq", help="file of degrees: use the configuration model")
    _common(p)

    p = sub.add_parser("degseq", help="sample a degree sequence")
    _size(p)
    p.add_argument("--alpha", type=float, default=2.0)
    _common(p)

    for name, fn in (("count", "count"), ("clusters", "clusters"), ("rigidity", "rigidity"),
                     ("pairs", "pairs"), ("sp-sample", "sp")):
        p = sub.add_parser(name)
        _infile(p)
        _common(p)
        if name == "rigidity":
            p.add_argument("--xi", type=float, default=0.25)
            p.add_argument("--index", type=int, default=0, help="solution index in lexicographic order")
            p.add_argument("--good-slack", type=float, default=1.0,
                           help="multiplier on k^13 4^-k in the goodness check")
        if name in ("pairs", "sp-sample"):
            p.add_argument("--trials", type=int, default=1000)
        if name == "sp-sample":
            p.add_argument("--show", type=int, default=10)

    p = sub.add_parser("thresholds")
    p.add_argument("--k", type=int, required=True)
    _common(p, seed=False)

    p = sub.add_parser("eta-scan")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--beta-min", type=float, default=0.0)
    p.add_argument("--beta-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=101)
    _common(p, seed=False)

    p = sub.add_parser("psi-eval")
    p.add_argument("--params", required=True, help="JSON file with k, r, fractions, overlap")
    _common(p, seed=False)

    p = sub.add_parser("pair-exponent")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--alpha-grid", type=int, default=101)
    p.add_argument("--alpha-min", type=float)
    _common(p, seed=False)

    p = sub.add_parser("occupancy")
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--balls", type=int)
    p.add_argument("--total", type=int)
    p.add_argument("--capacities", help="FILE, 'inf' or 'poisson-sample'")
    p.add_argument("--hard-cap", type=float)
    p.add_argument("--target-empty", type=int)
    p.add_argument("--slot-prob", type=float, default=0.5)
    p.add_argument("--poisson-mean", type=float, default=1.0)
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=float)
    _common(p)

    p = sub.add_parser("montecarlo", help="E[Z] and free-count windows over uniform formulas")
    _size(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--window", type=int, default=1, help="free-count window width")
    _common(p)

    p = sub.add_parser("llt", help="saddle-point local limit probability")
    p.add_argument("--pgf", choices=("poisson", "binomial", "finite"), default="poisson")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--coeffs", help="comma-separated coefficients for a finite PGF")
    p.add_argument("--lower", type=int, default=0)
    p.add_argument("--upper", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    _common(p, seed=False)
    return parser


COMMANDS = {
    "count": cmd_count, "clusters": cmd_clusters, "rigidity": cmd_rigidity, "pairs": cmd_pairs,
    "sp-sample": cmd_sp_sample, "thresholds": cmd_thresholds, "eta-scan": cmd_eta_scan,
    "psi-eval": cmd_psi_eval, "pair-exponent": cmd_pair_exponent, "occupancy": cmd_occupancy,
    "montecarlo": cmd_montecarlo, "llt": cmd_llt,
}


def _csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header, rows = table
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else
                    ("" if x is None else x) for x in row])
    return buf.getvalue()


def record(command, params, seeds, results, dropped, wall_time) -> dict:
    return {"schema": SCHEMA, "command": command, "params": _plain(params), "seeds": _plain(seeds),
            "build": build_id(), "rng": RNG_ALGORITHM, "results": _plain(results),
            "asymptotic_terms_dropped": _plain(dropped), "wall_time": wall_time}


def _emit(text: str, out: str | None, stdout):
    if out:
        Path(out).write_text(text)
    else:
        stdout.write(text)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        if args.command == "gen":
            _emit(cmd_gen(args), args.out, stdout)
            return EXIT_OK
        if args.command == "degseq":
            text, (params, seeds, results) = cmd_degseq(args)
            rec = record("degseq", params, seeds, results, (), time.perf_counter() - start)
            _emit(text + json.dumps(rec, sort_keys=True) + "\n", args.out, stdout)
            return EXIT_OK
        params, seeds, results, dropped, table = COMMANDS[args.command](args)
        if args.format == "csv":
            text = _csv(table)
        else:
            rec = record(args.command, params, seeds, results, dropped, time.perf_counter() - start)
            text = json.dumps(rec, sort_keys=True, indent=2) + "\n"
        _emit(text, args.out, stdout)
        return EXIT_OK
    except DomainError as exc:
        sys.stderr.write(f"naesat-lab: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"naesat-lab: {exc}\n")
        return EXIT_IO


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
