"""Seeded random scenarios for the property suites.

Case ``i`` of a run with master seed ``s`` draws from
``np.random.default_rng([s, i])``, so any single case can be replayed.
Connection coefficients are uniform in [-1, 1] per algebra coordinate and per
monomial up to degree 2.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import lie, transport, verify
from .amplitude import (VerificationReport, check_conjugation_invariance,
                        check_gauge_invariance, check_subadditivity)
from .connection import Chart, exp_product_gauge, monomials, random_polynomial

SUITE_DEFAULTS = {
    "theorem": {"steps": 2048, "grid": (64, 128)},
    "subadditivity": {"steps": 2048},
    "conjugation": {"steps": 2048},
    "gauge": {"steps": 16384},
    "radial": {"steps": 4096, "h_r": 1e-3},
}


def case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def theorem_case(rng, steps, grid, **_):
    conn = random_polynomial(lie.SU2, Chart.ball((0.0, 0.0), 1.5), rng)
    return verify.check_theorem(conn, verify.identity_disk(), grid, steps)


def _loop_at(p, radius):
    return transport.circle(radius, np.asarray(p) - np.array([radius, 0.0]))


def subadditivity_case(rng, steps, **_):
    conn = random_polynomial(lie.SU2, Chart.ball((0.0, 0.0), 2.0), rng)
    p = rng.uniform(-0.2, 0.2, 2)
    gamma = _loop_at(p, rng.uniform(0.2, 0.6))
    eta = _loop_at(p, rng.uniform(0.2, 0.6))
    if rng.random() < 0.5:
        eta = transport.reverse(eta)
    return check_subadditivity(conn, gamma, eta, steps)


def conjugation_case(rng, steps, **_):
    conn = random_polynomial(lie.SU2, Chart.ball((0.0, 0.0), 2.0), rng)
    p = rng.uniform(-0.2, 0.2, 2)
    gamma = _loop_at(p, rng.uniform(0.2, 0.6))
    eta = transport.polynomial([p, rng.uniform(-0.4, 0.4, 2), rng.uniform(-0.3, 0.3, 2)])
    return check_conjugation_invariance(conn, gamma, eta, steps)


def gauge_case(rng, steps, **_):
    chart = Chart.ball((0.0, 0.0), 1.5)
    conn = random_polynomial(lie.SU2, chart, rng)
    phases = rng.uniform(-1.0, 1.0, (3, len(monomials(2, 2))))
    gauge = exp_product_gauge(lie.SU2, 2, phases=phases)
    loop = transport.circle(rng.uniform(0.3, 0.9))
    return check_gauge_invariance(conn, gauge, loop, steps)


def radial_case(rng, steps, h_r, **_):
    conn = random_polynomial(lie.SU2, Chart.ball((0.0, 0.0), 1.5), rng)
    return verify.check_radial_estimate(conn, float(rng.uniform(0.2, 0.9)), h_r, steps)


SUITES = {
    "theorem": theorem_case,
    "subadditivity": subadditivity_case,
    "conjugation": conjugation_case,
    "gauge": gauge_case,
    "radial": radial_case,
}


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HOLONOMY_LAB_THREADS", "1")))
    except ValueError:
        return 1


def run_case(suite: str, seed: int, index: int, **overrides) -> VerificationReport:
    opts = {**SUITE_DEFAULTS[suite], **{k: v for k, v in overrides.items() if v is not None}}
    rep = SUITES[suite](case_rng(seed, index), **opts)
    rep.scenario = f"{suite}-{index:04d}"
    rep.diagnostics["seed"] = seed
    rep.diagnostics.setdefault("grid", "")
    if "grid" in opts and not rep.diagnostics["grid"]:
        rep.diagnostics["grid"] = f"{opts['grid'][0]}x{opts['grid'][1]}"
    return rep


def run_suite(suite: str, count: int, seed: int, threads: int | None = None, **overrides) -> list:
    """Reports for cases 0..count-1, ordered by index whatever the thread count."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    threads = thread_count() if threads is None else threads
    if threads == 1:
        return [run_case(suite, seed, i, **overrides) for i in range(count)]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda i: run_case(suite, seed, i, **overrides), range(count)))
