import csv
import io
import json
import math
from pathlib import Path

import pytest

from naesat_lab.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE, run
from naesat_lab.formula import parse_formula, read_formula
from naesat_lab.rates import thresholds

DATA = Path(__file__).parent / "data"


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], buf)
    return code, buf.getvalue()


def record(*argv):
    code, out = call(*argv)
    assert code == EXIT_OK, out
    return json.loads(out)


def rows(*argv):
    code, out = call(*argv, "--format", "csv")
    assert code == EXIT_OK
    return list(csv.reader(io.StringIO(out)))


def strip_volatile(rec):
    return {k: v for k, v in rec.items() if k not in ("wall_time", "build")}


def test_thresholds_record():
    rec = record("thresholds", "--k", 12)
    assert rec["schema"] == 1 and rec["command"] == "thresholds"
    t = thresholds(12)
    for field in ("r_first_exact", "r_first_asymp", "r_cond", "r_sh_estimate", "r_star_closed",
                  "r_star_numeric", "r_star_lower", "eps_k_note"):
        assert rec["results"][field] == getattr(t, field)
    assert rec["asymptotic_terms_dropped"]


def test_count_empty_formula():
    rec = record("count", "--in", DATA / "empty_n4.naecnf")
    assert rec["results"]["Z"] == 16


def test_count_corpus():
    rec = record("count", "--in", DATA / "five_k3.naecnf")
    assert rec["results"]["Z"] == 8
    assert sum(h["count"] for h in rec["results"]["beta_histogram"]) == 8


def test_clusters_corpus():
    rec = record("clusters", "--in", DATA / "five_k3.naecnf", "--theta", 0.01)
    assert rec["results"]["N_balls"] == 8 and rec["results"]["N_components"] == 2
    table = rows("clusters", "--in", DATA / "five_k3.naecnf")
    assert table[0] == ["distance", "count"]
    assert sum(int(r[1]) for r in table[1:]) == math.comb(8, 2)


def test_gen_round_trip(tmp_path):
    out = tmp_path / "f.naecnf"
    assert call("gen", "--n", 12, "--m", 20, "--k", 4, "--seed", 5, "--out", out)[0] == EXIT_OK
    text = out.read_text()
    F = read_formula(out)
    assert parse_formula(text) == F
    assert (F.n, F.m, F.k) == (12, 20, 4)
    _, again = call("gen", "--n", 12, "--m", 20, "--k", 4, "--seed", 5)
    assert again == text


def test_gen_from_degree_file(tmp_path):
    deg = tmp_path / "d.txt"
    deg.write_text("2\n2\n2\n")
    code, out = call("gen", "--n", 3, "--m", 2, "--k", 3, "--degseq", deg, "--seed", 1)
    assert code == EXIT_OK
    assert list(parse_formula(out).degrees) == [2, 2, 2]


def test_degseq_output():
    code, out = call("degseq", "--n", 20, "--m", 10, "--k", 3, "--seed", 2)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert sum(int(x) for x in lines[:20]) == 30
    assert json.loads(lines[20])["command"] == "degseq"


@pytest.mark.parametrize("argv", [
    ("montecarlo", "--n", 10, "--m", 15, "--k", 4, "--trials", 30, "--seed", 3),
    ("pairs", "--in", DATA / "five_k3.naecnf", "--trials", 20, "--seed", 3),
    ("sp-sample", "--in", DATA / "five_k3.naecnf", "--trials", 50, "--seed", 3),
    ("occupancy", "--bins", 5, "--balls", 7, "--capacities", "inf", "--mode", "mc",
     "--trials", 200, "--seed", 3),
    ("degseq", "--n", 30, "--m", 20, "--k", 3, "--seed", 3),
])
def test_determinism(argv):
    a = call(*argv)[1]
    b = call(*argv)[1]
    if argv[0] == "degseq":
        a, b = a.splitlines()[:-1], b.splitlines()[:-1]
        assert a == b
        return
    assert strip_volatile(json.loads(a)) == strip_volatile(json.loads(b))


def test_threads_do_not_change_results():
    argv = ("montecarlo", "--n", 10, "--m", 15, "--k", 4, "--trials", 40, "--seed", 8)
    one = record(*argv, "--threads", 1)
    four = record(*argv, "--threads", 4)
    assert one["results"] == four["results"]


def test_exit_codes(tmp_path):
    assert call("frobnicate")[0] == EXIT_USAGE
    assert call("thresholds", "--k", 12, "--bogus")[0] == EXIT_USAGE
    assert call("thresholds")[0] == EXIT_USAGE
    assert call("thresholds", "--k", 2)[0] == EXIT_DOMAIN
    assert call("count", "--in", tmp_path / "missing.naecnf")[0] == EXIT_IO
    bad = tmp_path / "bad.naecnf"
    bad.write_text("p naecnf 3 1 3\n1 2 0\n")
    assert call("count", "--in", bad)[0] == EXIT_DOMAIN


def test_eta_scan_rows():
    table = rows("eta-scan", "--k", 10, "--r", 350, "--steps", 101)
    assert table[0] == ["beta", "f", "h", "g", "eta"]
    betas = [float(r[0]) for r in table[1:]]
    assert len(betas) == 101
    assert all(a < b for a, b in zip(betas, betas[1:]))


def test_grid_refusal():
    code, _ = call("eta-scan", "--k", 10, "--r", 350, "--steps", 10 ** 7)
    assert code == EXIT_DOMAIN


def test_pair_exponent_endpoint():
    table = rows("pair-exponent", "--k", 12, "--r", 1418.9, "--alpha-grid", 50)
    assert len(table) == 51
    assert float(table[-1][0]) == 0.5
    assert float(table[1][0]) == 12.0 ** -6


def test_psi_eval(tmp_path):
    point = {"k": 10, "r": 350.0,
            "fractions": {"g_rr": 0.01, "g_rb": 6.9, "g_br": 6.9, "g_bb": 3500.0, "gamma": 0.1},
            "overlap": {"a_rr": 0.5, "a_rb": 0.5, "a_br": 0.5, "a_bb": 0.5, "a_gamma": 0.5}}
    f = tmp_path / "p.json"
    f.write_text(json.dumps(point))
    rec = record("psi-eval", "--params", f)
    r = rec["results"]
    parts = ("psi_sigma", "psi_rr", "psi_gamma", "psi_rb", "psi_br", "psi_bb")
    assert r["total"] == pytest.approx(sum(r[p] for p in parts))
    point["overlap"]["a_bb"] = 1.5
    f.write_text(json.dumps(point))
    assert call("psi-eval", "--params", f)[0] == EXIT_DOMAIN
    f.write_text(json.dumps({"k": 10}))
    assert call("psi-eval", "--params", f)[0] == EXIT_DOMAIN


def test_occupancy_modes(tmp_path):
    rec = record("occupancy", "--bins", 3, "--balls", 3)
    assert rec["results"]["empty_pmf"][0] == pytest.approx(2 / 9)
    rec = record("occupancy", "--bins", 6, "--total", 8, "--capacities", "inf", "--target-empty", 2)
    plain = record("occupancy", "--bins", 6, "--balls", 8)
    assert rec["results"]["prob"] == pytest.approx(plain["results"]["empty_pmf"][2], abs=1e-12)
    caps = tmp_path / "caps.txt"
    caps.write_text("1 1\n")
    rec = record("occupancy", "--bins", 2, "--total", 2, "--capacities", caps, "--mode", "mc",
                 "--trials", 50)
    assert rec["results"]["empty_pmf"] == {"0": 1.0}
    assert call("occupancy", "--bins", 3, "--total", 2, "--capacities", caps)[0] == EXIT_DOMAIN
    rec = record("occupancy", "--bins", 20, "--total", 15, "--capacities", "poisson-sample",
                 "--k", 3, "--r", 1.0, "--target-empty", 8, "--hard-cap", 9, "--slot-prob", 0.3)
    assert 0 <= rec["results"]["prob"] <= 1


def test_llt_command():
    rec = record("llt", "--pgf", "poisson", "--lam", 2, "--n", 200, "--alpha", 2)
    assert rec["results"]["zeta"] == pytest.approx(1.0, abs=1e-10)
    assert rec["results"]["relative_error"] <= 0.02
    assert call("llt", "--pgf", "finite", "--coeffs", "0.5,0,0.5", "--n", 10, "--alpha", 1)[0] == EXIT_DOMAIN


def test_rigidity_command():
    rec = record("rigidity", "--in", DATA / "five_k3.naecnf", "--xi", 0.4, "--index", 0)
    assert set(rec["results"]["rigid"]) <= set(range(1, 6))
    assert call("rigidity", "--in", DATA / "five_k3.naecnf", "--index", 99)[0] == EXIT_DOMAIN


def test_montecarlo_record():
    rec = record("montecarlo", "--n", 8, "--m", 10, "--k", 4, "--trials", 50, "--window", 3)
    res = rec["results"]
    assert res["expected_Z"] == pytest.approx(2 ** 8 * (1 - 2 ** -3) ** 10)
    assert res["windows"][0]["free_lo"] == 0 and res["windows"][-1]["free_hi"] == 8


def test_golden_csv():
    out = call("eta-scan", "--k", 8, "--r", 80, "--steps", 3, "--format", "csv")[1]
    assert out == (
        "beta,f,h,g,eta\n"
        "0.0,-0.0,0.065439574385883,0.06094948648022388,16.059383862226106\n"
        "0.5,-0.0009938698244954035,0.06444570456138761,0.06220066060855805,16.25253104278605\n"
        "1.0,-0.006477827554649932,0.05896174683123308,0.05896174683123308,15.75253104278605\n"
    )


def test_out_file(tmp_path):
    target = tmp_path / "t.json"
    assert call("thresholds", "--k", 5, "--out", target)[0] == EXIT_OK
    assert json.loads(target.read_text())["params"] == {"k": 5}
    assert call("thresholds", "--k", 5, "--out", tmp_path / "no" / "dir.json")[0] == EXIT_IO
