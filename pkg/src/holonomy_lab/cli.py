"""Command-line harness: run scenario files or fuzz suites, write CSV.

Exit status: 0 all checks pass, 1 some check failed, 2 configuration error
(including scenarios whose paths leave the chart), 3 numerical breakdown (e.g. a holonomy on the cut locus).
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as cfg
from . import fuzz, transport, verify
from .amplitude import (VerificationReport, abelian_amplitude_integral,
                        amplitude_of_transport)
from .errors import ConfigError, HolonomyError, NumericalBreakdown
from .gauge_axial import axial_gauge

COLUMNS = ["scenario_id", "lhs", "rhs", "slack", "tolerance", "pass", "N", "grid", "seed"]

COLUMN_HELP = (
    "CSV columns: scenario_id, lhs, rhs, slack, tolerance, pass, N, grid, seed. "
    "slack is rhs - lhs for inequalities and -|lhs - rhs| for equalities."
)

SUBCOMMANDS = {
    "transport": "lhs = max group drift of the exponential midpoint transport, rhs = 1e-12 bound.",
    "amplitude": "lhs = holonomy amplitude; rhs = independent value (line integral for U1, "
                 "RK4 transport otherwise); pass iff |lhs - rhs| <= tolerance.",
    "curvature-mass": "lhs = curvature mass on the grid, rhs = the same on a doubled grid; "
                      "pass iff they agree to 1e-4 relative.",
    "verify-theorem": "lhs = amplitude of the surface boundary, rhs = curvature mass; "
                      "pass iff lhs <= rhs + 1e-5 + 1e-3 rhs.",
    "verify-corollary": "lhs = amplitude of the loop, rhs = length^2 sup|Omega| / 4pi over the filling.",
    "verify-lemma": "lhs = |d/dr g_r(1) + boundary terms|, rhs = |2 pi r transported curvature integral|; "
                    "pass iff the matched sign residual <= 10 (h_r^2 + 1/N^2), given as tolerance.",
    "verify-radial": "lhs = |ampl(r+h) - ampl(r-h)| / 2h, rhs = r * circle integral of |Omega|.",
    "sweep-radius": "one row per radius: lhs = ampl(gamma_r), rhs = curvature mass of B_r.",
    "axial-gauge": "lhs = axial residual on the node grid, rhs = numerics.max_residual.",
    "fuzz": "one row per seeded random case of the chosen suite (no config needed).",
}


def _equality(sid, lhs, rhs, tol, diag):
    gap = abs(lhs - rhs)
    return VerificationReport(sid, lhs, rhs, tol, gap <= tol, -gap, diag)


def _need(obj, key, sid):
    if obj is None:
        raise ConfigError("required for this subcommand", f"{sid}.{key}")
    return obj


def run_transport(sc: cfg.ScenarioConfig, steps, grid):
    conn = sc.build_connection()
    path = _need(sc.build_path(), "path", sc.id)
    res = transport.parallel_transport(conn, path, steps)
    tol = 1e-12
    return [VerificationReport(sc.id, res.drift, tol, tol, res.drift <= tol, tol - res.drift, {"N": steps})]


def run_amplitude(sc, steps, grid):
    conn = sc.build_connection()
    loop = _need(sc.build_path(), "path", sc.id)
    amp = amplitude_of_transport(transport.parallel_transport(conn, loop, steps)).value
    if conn.kind.tag == "U1":
        ref, tol = abelian_amplitude_integral(conn, loop, steps), 1e-7
    else:
        ref = amplitude_of_transport(transport.rk4_transport(conn, loop, steps)).value
        tol = 1e-6
    return [_equality(sc.id, amp, ref, tol, {"N": steps})]


def run_curvature_mass(sc, steps, grid):
    conn = sc.build_connection()
    surface = _need(sc.build_surface(), "surface", sc.id)
    coarse = verify.curvature_mass(conn, surface, grid)
    fine = verify.curvature_mass(conn, surface, (2 * grid[0], 2 * grid[1]))
    return [_equality(sc.id, coarse, fine, 1e-4 * max(1.0, abs(fine)), {"grid": f"{grid[0]}x{grid[1]}"})]


def run_theorem(sc, steps, grid):
    conn = sc.build_connection()
    surface = _need(sc.build_surface(), "surface", sc.id)
    rep = verify.check_theorem(conn, surface, grid, steps, scenario=sc.id)
    return [rep]


def run_corollary(sc, steps, grid):
    conn = sc.build_connection()
    loop = _need(sc.build_path(), "path", sc.id)
    return [verify.check_corollary_planar(conn, loop, sc.build_surface(), grid, steps, scenario=sc.id)]


def run_lemma(sc, steps, grid):
    conn = sc.build_connection()
    r = float(_need(sc.numerics.get("radius"), "numerics.radius", sc.id))
    return [verify.check_derivative_lemma(conn, r, steps, float(sc.numeric("h_r")), scenario=sc.id)]


def run_radial(sc, steps, grid):
    conn = sc.build_connection()
    r = float(_need(sc.numerics.get("radius"), "numerics.radius", sc.id))
    return [verify.check_radial_estimate(conn, r, float(sc.numeric("h_r")), steps,
                                         int(sc.numeric("n_theta")), scenario=sc.id)]


def run_sweep(sc, steps, grid):
    conn = sc.build_connection()
    radii = _need(sc.numerics.get("radii"), "numerics.radii", sc.id)
    rows = verify.sweep_radius(conn, radii, steps, grid)
    return [VerificationReport(f"{sc.id}@r={row['r']:g}", row["amplitude"], row["mass"], row["tolerance"],
                               row["pass"], row["slack"], {"N": steps, "grid": f"{grid[0]}x{grid[1]}"})
            for row in rows]


def run_axial(sc, steps, grid):
    conn = sc.build_connection()
    v = _need(sc.numerics.get("direction"), "numerics.direction", sc.id)
    n = int(sc.numeric("axial_grid"))
    res = axial_gauge(conn, np.asarray(v, float), n, sc.numerics.get("line_steps"))
    bound = float(sc.numeric("max_residual"))
    return [VerificationReport(sc.id, res.residual, bound, bound, res.residual <= bound,
                               bound - res.residual, {"grid": f"{n}x{n}"})]


RUNNERS = {
    "transport": run_transport,
    "amplitude": run_amplitude,
    "curvature-mass": run_curvature_mass,
    "verify-theorem": run_theorem,
    "verify-corollary": run_corollary,
    "verify-lemma": run_lemma,
    "verify-radial": run_radial,
    "sweep-radius": run_sweep,
    "axial-gauge": run_axial,
}


def parse_grid(text: str):
    try:
        nr, nt = (int(x) for x in text.lower().split("x"))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"grid must look like 256x256, got {text!r}") from err
    return nr, nt


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holonomy-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=text, description=f"{text}\n\n{COLUMN_HELP}")
        p.add_argument("--config", required=name != "fuzz", help="scenario TOML file")
        p.add_argument("--out", help="write CSV here instead of standard output")
        p.add_argument("--seed", type=int, help="master seed (recorded in the seed column)")
        p.add_argument("--steps", type=int, help="transport step count N")
        p.add_argument("--grid", type=parse_grid, help="polar grid as <nr>x<nt>")
        if name == "fuzz":
            p.add_argument("--count", type=int, default=100, help="number of random cases")
            p.add_argument("--suite", default="theorem", choices=sorted(fuzz.SUITES))
    return parser


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(reports, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rep in reports:
        row = rep.as_row()
        writer.writerow([_format(row[c]) for c in COLUMNS])


def _run_scenarios(args):
    scenarios = cfg.load(args.config)
    runner = RUNNERS[args.command]

    def one(sc):
        steps = args.steps or int(sc.numeric("steps"))
        grid = args.grid or tuple(sc.numeric("grid"))
        reps = runner(sc, steps, grid)
        seed = args.seed if args.seed is not None else sc.numerics.get("seed", "")
        for rep in reps:
            rep.diagnostics.setdefault("N", steps)
            rep.diagnostics["seed"] = seed
        return reps

    threads = fuzz.thread_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            batches = list(pool.map(one, scenarios))
    else:
        batches = [one(sc) for sc in scenarios]
    reports = [rep for batch in batches for rep in batch]
    return sorted(reports, key=lambda rep: rep.scenario)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fuzz":
            overrides = {"steps": args.steps, "grid": args.grid}
            if args.config:
                sc = cfg.load(args.config)[0]
                overrides = {"steps": args.steps or sc.numerics.get("steps"),
                             "grid": args.grid or (tuple(sc.numerics["grid"]) if "grid" in sc.numerics else None)}
            seed = 0 if args.seed is None else args.seed
            reports = fuzz.run_suite(args.suite, args.count, seed, **overrides)
        else:
            reports = _run_scenarios(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except NumericalBreakdown as err:
        print(f"numerical breakdown: {err}", file=sys.stderr)
        return 3
    except HolonomyError as err:
        # chart, radius and path mismatches are problems with the scenario itself
        print(f"config error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2

    buf = io.StringIO()
    write_csv(reports, buf)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0 if all(rep.passed for rep in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
