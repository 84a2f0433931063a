"""Acceptance criteria, one test each, run at their stated tolerances.

Every test prints a single PASS/FAIL line (repeated in the terminal summary).
"""
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from holonomy_lab import config, fuzz, lie, transport, verify
from holonomy_lab.amplitude import amplitude
from holonomy_lab.connection import Chart, make_connection, random_polynomial
from holonomy_lab.gauge_axial import axial_gauge
from holonomy_lab.lie import SO, SU2, U1

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def scenarios(name):
    return {sc.id: sc for sc in config.load(CONFIGS / name)}


def test_criterion_01_abelian_equality(report):
    ok, notes = True, []
    for sid, sc in scenarios("abelian.toml").items():
        conn, surface = sc.build_connection(), sc.build_surface()
        B = abs(sc.connection["B"])
        start = time.perf_counter()
        amp = amplitude(conn, transport.circle(1.0), 4096).value
        mass = verify.curvature_mass(conn, surface, (256, 256))
        elapsed = time.perf_counter() - start
        err = max(abs(amp - B * np.pi), abs(mass - B * np.pi))
        ok &= err <= 1e-5 and elapsed < 1.0
        notes.append(f"B={B:g}: err {err:.1e}, {elapsed:.3f}s")
    assert report(1, "abelian equality ampl = mass = |B| pi", ok, "; ".join(notes))


def test_criterion_02_theorem_fuzz(report):
    start = time.perf_counter()
    reps = fuzz.run_suite("theorem", 200, seed=2024, threads=1)
    elapsed = time.perf_counter() - start
    passed = sum(r.passed for r in reps)
    slack = np.array([r.slack for r in reps])
    ok = passed == 200 and elapsed < 120
    detail = (f"{passed}/200 in {elapsed:.1f}s; slack min {slack.min():.3g}, "
              f"median {np.median(slack):.3g}, max {slack.max():.3g}")
    assert report(2, "theorem inequality on 200 random SU2 connections", ok, detail)


def test_criterion_03_winding(report):
    sc = scenarios("winding.toml")["winding-B6"]
    conn, loop = sc.build_connection(), sc.build_path()
    amp = amplitude(conn, loop, 4096)
    naive = lie.geodesic_distance(lie.GroupElement.identity(U1), transport.holonomy(conn, loop, 4096))
    ok = amp.method == "winding-lift" and abs(amp.value - 6 * np.pi) <= 1e-5 and naive <= 1e-9
    assert report(3, "winding lift 6 pi vs geodesic-log 0", ok,
                  f"ampl - 6pi = {amp.value - 6 * np.pi:.1e}, geodesic-log = {naive:.1e}")


def test_criterion_04_derivative_lemma(report):
    bundled = scenarios("lemma.toml")
    ab = bundled["lemma-abelian"]
    rep_ab = verify.check_derivative_lemma(ab.build_connection(), ab.numerics["radius"],
                                           ab.numerics["steps"], ab.numerics["h_r"])
    su = bundled["lemma-su2-constant"]
    rep_su = verify.check_derivative_lemma(su.build_connection(), su.numerics["radius"],
                                           su.numerics["steps"], su.numerics["h_r"])
    # extra scenarios that only vote on the sign
    ball = Chart.ball((0.0, 0.0), 1.5)
    extra = [random_polynomial(SU2, ball, np.random.default_rng(s), scale=0.5) for s in range(3)]
    extra.append(random_polynomial(SO(3), ball, np.random.default_rng(9), scale=0.5))
    extra.append(make_connection("constant-field", U1, ball, B=2.0))
    signs = {r.diagnostics["matched_sign"] for r in
             [rep_ab, rep_su] + [verify.check_derivative_lemma(c, 0.5, 4096, 1e-3) for c in extra]}
    res_ab = rep_ab.diagnostics["residual_minus"]
    res_su = min(rep_su.diagnostics["residual_plus"], rep_su.diagnostics["residual_minus"])
    ok = (rep_ab.diagnostics["matched_sign"] == "-" and res_ab <= 1e-8 and res_su <= 1e-5
          and signs == {"-"})
    detail = f"abelian minus residual {res_ab:.1e}; SU2 residual {res_su:.1e}; signs {sorted(signs)}"
    assert report(4, "derivative identity matches the minus branch", ok, detail)


def test_criterion_05_radial(report):
    sc = scenarios("radial.toml")["radial-constant-field"]
    rep = verify.check_radial_estimate(sc.build_connection(), sc.numerics["radius"], sc.numerics["h_r"],
                                       sc.numerics["steps"], sc.numerics["n_theta"])
    gap = abs(rep.lhs - rep.rhs)
    reps = fuzz.run_suite("radial", 100, seed=2024, threads=1)
    passed = sum(r.passed for r in reps)
    ok = gap <= 1e-4 and passed == 100
    assert report(5, "radial estimate", ok, f"equality gap {gap:.1e}; random {passed}/100")


def test_criterion_06_corollary(report):
    bundled = scenarios("corollary.toml")
    out = {}
    for sid, sc in bundled.items():
        out[sid] = verify.check_corollary_planar(sc.build_connection(), sc.build_path(), sc.build_surface(),
                                                 tuple(sc.numerics["grid"]), sc.numerics["steps"])
    circ, ell = out["corollary-circle"], out["corollary-ellipse"]
    ok = abs(circ.lhs - circ.rhs) <= 1e-5 and ell.passed and ell.slack >= 0.1 * ell.rhs
    assert report(6, "planar isoperimetric corollary", ok,
                  f"circle gap {abs(circ.lhs - circ.rhs):.1e}; ellipse slack/rhs {ell.slack / ell.rhs:.3f}")


def test_criterion_07_axial_gauge(report):
    sc = scenarios("axial.toml")["axial-su2"]
    conn, v = sc.build_connection(), np.asarray(sc.numerics["direction"], float)
    r32 = axial_gauge(conn, v, 32).residual
    r64 = axial_gauge(conn, v, 64).residual
    ok = r64 <= 1e-5 and 3.0 <= r32 / r64 <= 5.0
    assert report(7, "axial gauge residual and second-order refinement", ok,
                  f"residual(64) {r64:.2e}; ratio 32/64 {r32 / r64:.2f}")


def test_criterion_08_propositions(report):
    counts = {}
    for suite, n in (("subadditivity", 100), ("conjugation", 100), ("gauge", 50)):
        reps = fuzz.run_suite(suite, n, seed=2024, threads=1)
        worst = max(-r.slack for r in reps) if suite != "subadditivity" else min(r.slack for r in reps)
        counts[suite] = (sum(r.passed and r.tolerance <= 1e-6 for r in reps), n, worst)
    ok = all(p == n for p, n, _ in counts.values())
    detail = "; ".join(f"{k} {p}/{n}" for k, (p, n, _) in counts.items())
    detail += (f"; min subadditivity slack {counts['subadditivity'][2]:.2e}, "
               f"worst conjugation gap {counts['conjugation'][2]:.1e}, worst gauge gap {counts['gauge'][2]:.1e}")
    assert report(8, "subadditivity, conjugation and gauge invariance fuzz", ok, detail)


def test_criterion_09_integrator(report):
    sc = scenarios("reference.toml")["reference-su2"]
    conn, loop = sc.build_connection(), sc.build_path()
    ref = transport.parallel_transport(conn, loop, 2 ** 15)
    drift = max(ref.drift, transport.parallel_transport(conn, loop, sc.numerics["steps"]).drift)
    ns = (64, 128, 256, 512, 1024)
    errs = [lie.frobenius(transport.parallel_transport(conn, loop, n).final.mat - ref.final.mat) for n in ns]
    ratios = [errs[i] / errs[i + 1] for i in range(len(ns) - 1)]
    ok = drift <= 1e-12 and all(3.5 <= q <= 4.5 for q in ratios)
    assert report(9, "group drift and Richardson ratio", ok,
                  f"max drift {drift:.1e}; ratios " + ", ".join(f"{q:.3f}" for q in ratios))


def test_criterion_10_determinism(report, tmp_path):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "holonomy_lab", "fuzz", "--seed", "42", "--count", "200",
                        "--out", str(out)], check=False)
        outputs.append(out.read_bytes())
    rows = outputs[0].count(b"\n") - 1
    ok = outputs[0] == outputs[1] and rows == 200
    assert report(10, "fuzz --seed 42 --count 200 is byte-identical across runs", ok,
                  f"{len(outputs[0])} bytes, {rows} rows")
