"""Command-line front end.

Subcommands:

* ``vertenum`` — V-representation of an H-rep file via the offline
  enumerator or one of the incremental (box / cone) backends.
* ``solve``    — outer approximation of a multiobjective instance file;
  writes the final polyhedron, a per-iteration report and a figure.
* ``gen``      — draw random accepted instances to files.
* ``bench``    — the shared-sequence timing harness; writes record and
  summary CSVs, the artificial-vertex table, and figures.

Exit codes: 0 success, 1 input/solver error, 2 empty polyhedron.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, benson, dd, oracle, plots
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, solve_lp
from .polyhedron import (
    ParseError,
    dump_polyhedron,
    load_cone_dd,
    load_hrep_lines,
    standard_cone_dd,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2


def _fmt(x):
    return format(float(x), ".12g")


def _fail(message):
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _support_point(halfspaces, dim, cone):
    """Apex y with the whole H-rep polyhedron inside {y} + cone."""
    rows = [(hs.a, ">=", hs.b) for hs in halfspaces]
    supports = []
    for facet in cone.facets:
        sol = solve_lp(LinearProgram(facet.a, rows, [None] * dim))
        if sol.status == INFEASIBLE:
            return None
        if sol.status == UNBOUNDED:
            raise ValueError(
                "input polyhedron is unbounded against the cone; "
                "its recession cone is larger than the supplied one"
            )
        supports.append(sol.objective_value)
    # deepest point y with facet_j^T y <= support_j for all j
    normals = np.array([f.a for f in cone.facets])
    target = -np.sum(normals, axis=0)
    sol = solve_lp(
        LinearProgram(
            target,
            [(normals[j], "<=", supports[j]) for j in range(len(supports))],
            [None] * dim,
        )
    )
    if sol.status != OPTIMAL:
        raise ValueError("could not place a base point below the polyhedron")
    return sol.x


def cmd_vertenum(args):
    try:
        text = Path(args.file).read_text()
        dim, halfspaces, declared_dirs = load_hrep_lines(text)
    except (OSError, ParseError, ValueError) as exc:
        return _fail(exc)
    if not halfspaces:
        return _fail("no facet lines in input")

    cone = None
    if args.mode in ("online-box", "online-cone"):
        try:
            cone = (
                load_cone_dd(Path(args.cone).read_text())
                if args.cone
                else standard_cone_dd(dim)
            )
        except (OSError, ParseError, ValueError) as exc:
            return _fail(exc)
        if cone.dim != dim:
            return _fail(f"cone dimension {cone.dim} does not match input dimension {dim}")

    try:
        if args.mode == "offline":
            hrep = oracle.HRep(halfspaces, dim, declared_dirs)
            vertices, directions = oracle.enumerate_vertices_brute(hrep)
        else:
            y = _support_point(halfspaces, dim, cone)
            if y is None:
                print("empty", file=sys.stderr)
                return EXIT_EMPTY
            if args.mode == "online-cone":
                poly = dd.init_cone(y, cone)
                for hs in halfspaces:
                    outcome = dd.onlinevert2(poly, hs)
                    if outcome.kind == dd.EMPTY:
                        print("empty", file=sys.stderr)
                        return EXIT_EMPTY
                vertices = list(poly.vertex_array())
                directions = list(poly.direction_array())
            else:
                poly, artificial = dd.init_box(y, cone, args.M)
                for hs in halfspaces:
                    outcome = dd.onlinevert(poly, hs)
                    if outcome.kind == dd.EMPTY:
                        print("empty", file=sys.stderr)
                        return EXIT_EMPTY
                vertices = dd.strip_artificial(poly, artificial)
                A = np.array([hs.a for hs in halfspaces])
                directions = [
                    z for z in cone.directions if float((A @ z).min()) >= -1e-9
                ]
    except (dd.RecessionConeViolationError, ValueError) as exc:
        return _fail(exc)

    if not vertices:
        print("empty", file=sys.stderr)
        return EXIT_EMPTY
    out = [f"d {dim}"]
    out += ["v " + " ".join(_fmt(c) for c in v) for v in vertices]
    out += ["z " + " ".join(_fmt(c) for c in z) for z in directions]
    print("\n".join(out))
    return EXIT_OK


def cmd_solve(args):
    try:
        inst = benson.load_instance(Path(args.file).read_text())
    except (OSError, ValueError) as exc:
        return _fail(exc)
    eps = args.eps if args.eps is not None else benson.default_epsilon(inst.d)
    try:
        report = benson.solve_molp(inst, eps, backend=args.backend, big_m=args.M)
    except benson.InfeasibleInstanceError:
        return _fail("infeasible")
    except (benson.UnboundedInstanceError, benson.NumericalFailureError) as exc:
        return _fail(exc)

    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.file).stem
    poly_path = outdir / f"{stem}_outer.poly"
    poly_path.write_text(dump_polyhedron(report.outer))
    records = [
        bench.BenchRecord(
            0, rec.iteration, report.backend, rec.ve_time_s,
            rec.n_actual, rec.n_artificial,
            None if rec.iteration == 0 else rec.alpha,
        )
        for rec in report.iterations
    ]
    csv_path = outdir / f"{stem}_report.csv"
    csv_path.write_text(bench.records_to_csv(records, with_timing=not args.no_timing))
    written = [poly_path, csv_path]
    if not args.no_plots:
        written.append(
            plots.plot_alpha_decay(
                report.iterations, outdir / f"{stem}_alpha.png", title=stem
            )
        )
    ncuts = sum(1 for rec in report.iterations if rec.cut is not None)
    print(f"cuts: {ncuts}")
    print(f"final vertices: {len(report.vertices)}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_gen(args):
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    accepted = bench.sample_instances(args.d, args.n, args.samples, args.seed)
    for seed, inst in accepted:
        path = outdir / f"molp_d{args.d}_n{args.n}_s{seed}.txt"
        path.write_text(benson.dump_instance(inst))
        print(f"wrote {path}")
    return EXIT_OK


def cmd_bench(args):
    backends = tuple(args.backends.split(","))
    for name in backends:
        if name not in benson.BACKENDS:
            return _fail(f"unknown backend {name!r}")
    eps = args.eps if args.eps is not None else benson.default_epsilon(args.d)
    instances = bench.sample_instances(args.d, args.n, args.samples, args.seed)
    workers = args.workers or int(os.environ.get(bench.WORKERS_ENV, "1"))
    records, failed = bench.run_benchmark(
        instances, eps, big_m=args.M, backends=backends, workers=workers,
        timing_reps=args.timing_reps,
    )
    if failed:
        print(f"excluded {len(failed)} instance(s): {failed}", file=sys.stderr)

    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    tag = f"d{args.d}_n{args.n}"
    with_timing = not args.no_timing
    rec_path = outdir / f"bench_{tag}_records.csv"
    rec_path.write_text(bench.records_to_csv(records, with_timing=with_timing))
    summary = bench.summarize(records, subsample=args.subsample)
    sum_path = outdir / f"bench_{tag}_summary.csv"
    sum_path.write_text(bench.summary_to_csv(summary, with_timing=with_timing))
    written = [rec_path, sum_path]

    if benson.BACKEND_BOX in backends:
        table = bench.artificial_vertex_table(records, subsample=args.subsample)
        art_path = outdir / f"bench_{tag}_artificial.csv"
        lines = ["iteration,avg_actual,avg_artificial,pct_artificial"]
        for iteration, actual, artificial, pct in table:
            lines.append(
                f"{iteration},{format(actual, '.6g')},"
                f"{format(artificial, '.6g')},{format(pct, '.6g')}"
            )
        art_path.write_text("\n".join(lines) + "\n")
        written.append(art_path)

    if not args.no_plots and with_timing:
        written.append(
            plots.plot_ve_times(
                summary, outdir / f"bench_{tag}_times.png",
                title=f"d={args.d}, n={args.n}, sample={len(instances)}",
            )
        )
        if benson.BACKEND_BOX in backends:
            written.append(
                plots.plot_artificial_share(
                    table, outdir / f"bench_{tag}_artificial.png",
                    title=f"d={args.d}, n={args.n}",
                )
            )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ddvert",
        description="Incremental vertex enumeration and multiobjective outer approximation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vertenum", help="enumerate vertices of an H-rep file")
    p.add_argument("file", help="H-rep in the polyhedron text format (d/f/z lines)")
    p.add_argument(
        "--mode",
        choices=("offline", "online-box", "online-cone"),
        default="online-cone",
    )
    p.add_argument("--M", type=float, default=benson.DEFAULT_BIG_M,
                   help="box scale for online-box mode")
    p.add_argument("--cone", help="cone double description file (default: R^d_+)")
    p.set_defaults(func=cmd_vertenum)

    p = sub.add_parser("solve", help="outer-approximate one instance file")
    p.add_argument("file", help="instance in the text format (d n m header)")
    p.add_argument("--eps", type=float, default=None,
                   help="approximation error (default 0.005 for d=2, else 0.05)")
    p.add_argument("--backend", choices=benson.BACKENDS, default=benson.BACKEND_CONE)
    p.add_argument("--M", type=float, default=benson.DEFAULT_BIG_M)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--no-timing", action="store_true",
                   help="zero out wall times for byte-stable output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="draw random accepted instances")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="three-backend timing harness")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--subsample", type=int, default=None,
                   help="keep this many instances with the most iterations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--M", type=float, default=benson.DEFAULT_BIG_M)
    p.add_argument("--backends", default=",".join(benson.BACKENDS),
                   help="comma-separated subset of offline,box,cone")
    p.add_argument("--workers", type=int, default=None,
                   help=f"parallel instances (or set {bench.WORKERS_ENV})")
    p.add_argument("--timing-reps", type=int, default=1,
                   help="median of this many VE timings per cut (reduces noise)")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--no-timing", action="store_true",
                   help="zero out wall times for byte-stable output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
