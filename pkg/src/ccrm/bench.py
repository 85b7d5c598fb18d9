"""Benchmark harness: batch generation, paired multi-method runs, medians,
Dolan–Moré performance profiles and "median(max)" tables.

Every trial of a grid cell ``(n, m)`` uses instance seed ``base_seed + t``.
All methods of a trial start from the same ``x0``, drawn by :func:`draw_x0`
from that seed, so a raw row can be replayed on its own.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError, SolverError
from .generate import EllipsoidGenConfig, generate_instance
from .solvers import SolverConfig, solve

log = logging.getLogger(__name__)

DEFAULT_METHODS = ("ccrm-cyclic", "ccrm-mv-distance", "sepm", "crm-p")
X0_BOX = 100.0

RAW_FIELDS = ["n", "m", "trial", "seed", "attempt", "method", "termination", "solved",
              "iterations", "final_error", "proj_evals", "cpu_time_s"]
SUMMARY_FIELDS = ["n", "m", "method", "solved", "failed",
                  "time_median", "time_max", "error_median", "error_max",
                  "iterations_median", "iterations_max"]
TIME_FIELDS = ("cpu_time_s", "time_median", "time_max")
MEASURES = {"time": "cpu_time_s", "iterations": "iterations"}
# lower clamp so that zero measures (x0 already feasible) have finite ratios
MEASURE_FLOOR = {"time": 1e-9, "iterations": 1.0}


def draw_x0(n: int, seed: int) -> np.ndarray:
    """Start point of trial ``seed``: uniform on ``[-100, 100]^n``."""
    return np.random.default_rng([int(seed), 7]).uniform(-X0_BOX, X0_BOX, n)


@dataclass
class ExperimentSpec:
    grid: list
    trials: int = 30
    methods: list = field(default_factory=lambda: list(DEFAULT_METHODS))
    epsilon: float = 1e-6
    max_iter: int = 3000
    base_seed: int = 0
    generator: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = [tuple(int(v) for v in cell) for cell in self.grid]
        if not self.grid:
            raise ConfigurationError("grid must be nonempty")
        if any(len(cell) != 2 for cell in self.grid):
            raise ConfigurationError("grid entries are (n, m) pairs")
        if self.trials < 1:
            raise ConfigurationError("trials must be at least 1")
        self.methods = [self._config(mth) for mth in self.methods]
        if not self.methods:
            raise ConfigurationError("need at least one method")

    def _config(self, mth) -> SolverConfig:
        if isinstance(mth, SolverConfig):
            cfg = mth
        elif isinstance(mth, str):
            cfg = SolverConfig.from_method_id(mth)
        elif isinstance(mth, dict):
            cfg = SolverConfig(**mth)
        else:
            raise ConfigurationError(f"cannot read method entry {mth!r}")
        cfg.epsilon = self.epsilon
        cfg.max_iter = self.max_iter
        return cfg

    @property
    def method_ids(self) -> list:
        return [c.method_id for c in self.methods]

    def to_dict(self):
        return {"grid": [list(c) for c in self.grid], "trials": self.trials,
                "methods": [c.to_dict() for c in self.methods], "epsilon": self.epsilon,
                "max_iter": self.max_iter, "base_seed": self.base_seed,
                "generator": dict(self.generator)}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        unknown = set(d) - {"grid", "trials", "methods", "epsilon", "max_iter",
                            "base_seed", "generator"}
        if unknown:
            raise ConfigurationError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class CellStats:
    n: int
    m: int
    method: str
    solved: int
    failed: int
    time_median: float
    time_max: float
    error_median: float
    error_max: float
    iterations_median: float
    iterations_max: float


@dataclass
class ProfileResult:
    """Curves ``rho_s(tau)`` sampled on ``taus`` (shared by all methods)."""

    taus: list
    curves: dict
    n_problems: int
    excluded: int

    def to_dict(self):
        return asdict(self)

    def to_tsv(self) -> str:
        methods = list(self.curves)
        lines = ["\t".join(["tau"] + methods)]
        for i, tau in enumerate(self.taus):
            lines.append("\t".join([repr(tau)] + [repr(self.curves[s][i]) for s in methods]))
        return "\n".join(lines) + "\n"


@dataclass
class BenchmarkSummary:
    spec: ExperimentSpec
    cells: list
    rows: list
    profiles: dict = field(default_factory=dict)

    def to_dict(self):
        return {"spec": self.spec.to_dict(), "cells": [asdict(c) for c in self.cells],
                "profiles": {k: p.to_dict() for k, p in self.profiles.items()}}


# -- running ----------------------------------------------------------------------

def run_trial(n: int, m: int, seed: int, methods, generator: Optional[dict] = None) -> list:
    """All methods on instance ``seed`` from the shared start point. Returns raw rows."""
    gen = EllipsoidGenConfig(n=n, m=m, seed=seed, **(generator or {}))
    inst = generate_instance(gen, log=log)
    x0 = draw_x0(n, seed)
    rows = []
    for cfg in methods:
        row = {"n": n, "m": m, "seed": seed, "attempt": inst.attempt, "method": cfg.method_id}
        try:
            trace = solve(inst.problem, cfg, x0)
        except SolverError as exc:
            log.warning("n=%d m=%d seed=%d %s failed: %s", n, m, seed, cfg.method_id, exc)
            trace = exc.trace
        row.update(termination=trace.termination, iterations=trace.iterations,
                   final_error=trace.final_residual,
                   proj_evals=trace.projection_evals[-1] if trace.projection_evals else 0,
                   cpu_time_s=trace.wall_time_s)
        row["solved"] = trace.termination != "Error" and trace.final_residual <= cfg.epsilon
        rows.append(row)
    return rows


def _median_max(values):
    a = np.asarray(values, dtype=np.float64)
    return float(np.median(a)), float(np.max(a))


def summarize(spec: ExperimentSpec, rows: list) -> list:
    cells = []
    for n, m in spec.grid:
        for mid in spec.method_ids:
            sel = [r for r in rows if r["n"] == n and r["m"] == m and r["method"] == mid]
            if not sel:
                continue
            tmed, tmax = _median_max([r["cpu_time_s"] for r in sel])
            emed, emax = _median_max([r["final_error"] for r in sel])
            imed, imax = _median_max([r["iterations"] for r in sel])
            solved = sum(bool(r["solved"]) for r in sel)
            cells.append(CellStats(n, m, mid, solved, len(sel) - solved,
                                   tmed, tmax, emed, emax, imed, imax))
    return cells


def run_experiment(spec: ExperimentSpec) -> BenchmarkSummary:
    rows = []
    for n, m in spec.grid:
        for t in range(spec.trials):
            seed = spec.base_seed + t
            for row in run_trial(n, m, seed, spec.methods, spec.generator):
                row["trial"] = t
                rows.append(row)
    profiles = {name: performance_profile(profile_table(rows, name),
                                          floor=MEASURE_FLOOR[name])
                for name in MEASURES}
    return BenchmarkSummary(spec, summarize(spec, rows), rows, profiles)


# -- performance profiles -----------------------------------------------------------

def profile_table(rows: list, measure: str = "time") -> dict:
    """``{problem: {method: value or None}}`` from raw rows; ``None`` marks a failure."""
    key = MEASURES[measure]
    table = {}
    for r in rows:
        prob = (int(r["n"]), int(r["m"]), int(r["seed"]))
        table.setdefault(prob, {})[r["method"]] = float(r[key]) if _truthy(r["solved"]) else None
    return table


def _truthy(v) -> bool:
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes")
    return bool(v)


def performance_profile(results: dict, taus=None, n_tau: int = 50,
                        floor: float = 0.0) -> ProfileResult:
    """Dolan–Moré profiles.

    ``results[p][s]`` is the measure of method ``s`` on problem ``p``, or
    ``None``/``inf``/``nan`` when the run failed. Failed runs never attain
    any ``tau``. Problems on which every method failed are dropped and
    counted in ``excluded``. Values are clamped below by ``floor``; solved
    entries must then be positive.

    Without ``taus`` the grid is ``n_tau`` log-spaced points on
    ``[1, max ratio]`` merged with every attained ratio, so each step of
    ``rho_s`` is sampled exactly and ``rho_s(taus[-1])`` is the solve
    fraction of ``s``.
    """
    methods = []
    for per in results.values():
        for s in per:
            if s not in methods:
                methods.append(s)
    ratios = {s: [] for s in methods}
    excluded = 0
    for p, per in results.items():
        vals = {}
        for s in methods:
            v = per.get(s)
            ok = v is not None and math.isfinite(v)
            vals[s] = max(float(v), floor) if ok else None
            if ok and not vals[s] > 0:
                raise ValueError(f"problem {p}: method {s} has nonpositive measure {v}")
        finite = [v for v in vals.values() if v is not None]
        if not finite:
            excluded += 1
            continue
        best = min(finite)
        for s in methods:
            ratios[s].append(math.inf if vals[s] is None else vals[s] / best)
    if excluded:
        log.info("performance profile: %d problem(s) failed by every method excluded", excluded)
    n_prob = len(next(iter(ratios.values()), []))

    if taus is None:
        attained = sorted({r for rs in ratios.values() for r in rs if math.isfinite(r)})
        top = attained[-1] if attained else 1.0
        grid = np.logspace(0.0, math.log10(top), n_tau) if top > 1.0 else np.array([1.0])
        taus = sorted(set(float(t) for t in grid) | set(attained) | {1.0})
    else:
        taus = [float(t) for t in taus]
        if any(b < a for a, b in zip(taus, taus[1:])):
            raise ValueError("taus must be nondecreasing")
    curves = {}
    for s in methods:
        rs = np.sort(np.asarray(ratios[s], dtype=np.float64))
        if n_prob == 0:
            curves[s] = [0.0] * len(taus)
        else:
            curves[s] = [int(np.searchsorted(rs, t, side="right")) / n_prob for t in taus]
    return ProfileResult(list(taus), curves, n_prob, excluded)


# -- output -----------------------------------------------------------------------------

def _fmt(measure, v):
    if measure == "error":
        return f"{v:.2e}"
    if measure == "iterations":
        return f"{v:g}"
    return f"{v:.3g}"


def _csv(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def raw_csv(rows: list) -> str:
    return _csv(RAW_FIELDS, sorted(rows, key=lambda r: (r["n"], r["m"], r["trial"])))


def read_raw_csv(text: str) -> list:
    return list(csv.DictReader(io.StringIO(text)))


def _text_table(title, measure, grid, methods, lookup) -> str:
    head = ["n", "m"] + methods
    body = []
    for n, m in grid:
        line = [str(n), str(m)]
        for mid in methods:
            c = lookup.get((n, m, mid))
            line.append("-" if c is None else
                        f"{_fmt(measure, getattr(c, measure + '_median'))}"
                        f"({_fmt(measure, getattr(c, measure + '_max'))})")
        body.append(line)
    widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
    out = [title, "  ".join(h.rjust(w) for h, w in zip(head, widths))]
    out += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in body]
    return "\n".join(out)


@dataclass
class Report:
    csv: str
    text: str


def emit_tables(summary: BenchmarkSummary) -> Report:
    """Summary CSV plus three aligned tables (Time, Error, Iterations) with
    ``median(max)`` cells, one row per ``(n, m)`` and one column per method."""
    cells = summary.cells
    csv_text = _csv(SUMMARY_FIELDS, [asdict(c) for c in cells])
    methods = summary.spec.method_ids if summary.spec else sorted({c.method for c in cells})
    grid = summary.spec.grid if summary.spec else sorted({(c.n, c.m) for c in cells})
    lookup = {(c.n, c.m, c.method): c for c in cells}
    blocks = [_text_table(title, measure, grid, methods, lookup)
              for title, measure in (("Time (s)", "time"), ("Error", "error"),
                                     ("Iterations", "iterations"))]
    return Report(csv_text, "\n\n".join(blocks) + "\n")


def strip_time_columns(csv_text: str) -> str:
    """Drop wall-time columns; what remains is deterministic in the spec."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    if not rows:
        return ""
    keep = [i for i, h in enumerate(rows[0]) if h not in TIME_FIELDS]
    return "\n".join(",".join(r[i] for i in keep) for r in rows) + "\n"


def load_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        return ExperimentSpec.from_dict(json.load(fh))
