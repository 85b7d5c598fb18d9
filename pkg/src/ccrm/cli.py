"""Command line: ``ccrm generate | solve | bench | profile``.

Failures exit nonzero with a one-line JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import bench
from .controls import POLICY_KINDS
from .generate import EllipsoidGenConfig, GeneratedInstance, generate_instance
from .solvers import METHODS, SolverConfig, solve


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_generate(args):
    for i in range(args.count):
        cfg = EllipsoidGenConfig(n=args.n, m=args.m, seed=args.seed + i, gamma=args.gamma,
                                 lambda_scale=args.lambda_scale, center_box=args.center_box)
        text = generate_instance(cfg, log=logging.getLogger("ccrm")).to_json() + "\n"
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            _write(os.path.join(args.out_dir, f"inst-n{args.n}-m{args.m}-s{cfg.seed}.json"), text)
        else:
            _write(None, text)


def _x0(spec, n, seed):
    if spec is None:
        return bench.draw_x0(n, seed)
    if os.path.exists(spec):
        return np.asarray(_read_json(spec), dtype=np.float64)
    return np.asarray(json.loads(spec), dtype=np.float64)


def cmd_solve(args):
    inst = GeneratedInstance.from_dict(_read_json(args.instance))
    problem = inst.problem
    control = args.control if args.method == "ccrm" else None
    cfg = SolverConfig(method=args.method, control=control, epsilon=args.eps,
                       max_iter=args.max_iter, seed=args.seed,
                       record_iterates=args.full)
    x0 = _x0(args.x0, problem.dimension, inst.config.seed)
    trace = solve(problem, cfg, x0)
    if args.trace_csv:
        _write(args.trace_csv, trace.to_csv())
    if args.full:
        out = trace.to_dict()
    else:
        out = {"method": trace.method, "termination": trace.termination,
               "iterations": trace.iterations, "final_error": trace.final_residual,
               "proj_evals": trace.projection_evals[-1] if trace.projection_evals else 0,
               "wall_time_s": trace.wall_time_s, "final_point": trace.final_point.tolist()}
    _write(None, json.dumps(out) + "\n")


def cmd_bench(args):
    spec = bench.load_spec(args.spec)
    summary = bench.run_experiment(spec)
    report = bench.emit_tables(summary)
    os.makedirs(args.out_dir, exist_ok=True)
    _write(os.path.join(args.out_dir, "raw.csv"), bench.raw_csv(summary.rows))
    _write(os.path.join(args.out_dir, "summary.csv"), report.csv)
    _write(os.path.join(args.out_dir, "tables.txt"), report.text)
    _write(os.path.join(args.out_dir, "summary.json"), json.dumps(summary.to_dict(), indent=1))
    for name, prof in summary.profiles.items():
        _write(os.path.join(args.out_dir, f"profile-{name}.tsv"), prof.to_tsv())
    _write(None, report.text)


def cmd_profile(args):
    with open(args.raw) as fh:
        rows = bench.read_raw_csv(fh.read())
    if not rows:
        raise CLIError(f"{args.raw} has no rows")
    prof = bench.performance_profile(bench.profile_table(rows, args.measure), n_tau=args.n_tau,
                                     floor=bench.MEASURE_FLOOR[args.measure])
    _write(args.output, prof.to_tsv())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ccrm", description="Circumcentered-reflection feasibility solvers.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write random ellipsoid instances as JSON")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1, help="seeds seed..seed+count-1")
    g.add_argument("--gamma", type=float, default=1.0)
    g.add_argument("--lambda-scale", type=float, default=1.1)
    g.add_argument("--center-box", type=float, default=5.0)
    g.add_argument("--out-dir", help="one file per instance (default: stdout)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run one method on one instance file")
    s.add_argument("instance")
    s.add_argument("--method", choices=METHODS, default="ccrm")
    s.add_argument("--control", choices=POLICY_KINDS, default="mv-distance")
    s.add_argument("--eps", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=3000)
    s.add_argument("--seed", type=int, default=0, help="seed of randomized controls")
    s.add_argument("--x0", help="JSON list or file; default: the instance's benchmark start")
    s.add_argument("--trace-csv", help="write per-iteration CSV here")
    s.add_argument("--full", action="store_true", help="print the full trace with iterates")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run an experiment spec (JSON)")
    b.add_argument("spec")
    b.add_argument("--out-dir", default="bench-out")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("profile", help="performance profile TSV from a raw bench CSV")
    f.add_argument("raw")
    f.add_argument("--measure", choices=sorted(bench.MEASURES), default="time")
    f.add_argument("--n-tau", type=int, default=50)
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_profile)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except Exception as exc:  # reported as JSON, never as a traceback
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
