"""Iteration drivers: successive cCRM, SePM, SiPM and CRM on the product space.

All drivers share one loop (:func:`solve`) and emit an :class:`IterationTrace`.
The residual ``e_k = sum_i |P_i(x^k) - x^k|`` is evaluated at every iterate;
its projections are counted as diagnostic work, separately from the
projections each method needs to take a step.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .circum import circumcenter
from .controls import POLICY_KINDS, ControlPolicy, SelectionRecord, make_policy
from .exceptions import CCRMError, ConfigurationError, SolverError
from .sets import FeasibilityProblem, as_vector

METHODS = ("ccrm", "sepm", "sipm", "crm-p")

STEP_SMALL = "StepSmall"
RESIDUAL_SMALL = "ResidualSmall"
ITER_LIMIT = "IterLimit"


@dataclass
class SolverConfig:
    method: str = "ccrm"
    control: Optional[str] = "mv-distance"
    epsilon: float = 1e-6
    max_iter: int = 3000
    seed: int = 0
    record_iterates: bool = False
    q_bound: Optional[int] = None
    step_window: Optional[int] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method == "ccrm":
            if self.control not in POLICY_KINDS:
                raise ConfigurationError(
                    f"unknown control {self.control!r}; expected one of {POLICY_KINDS}")
        else:
            self.control = None
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1")
        if self.step_window is not None and self.step_window < 1:
            raise ConfigurationError("step_window must be at least 1")

    @property
    def method_id(self) -> str:
        return f"ccrm-{self.control}" if self.method == "ccrm" else self.method

    @classmethod
    def from_method_id(cls, method_id: str, **kw) -> "SolverConfig":
        if method_id.startswith("ccrm-"):
            return cls(method="ccrm", control=method_id[5:], **kw)
        return cls(method=method_id, control=None, **kw)

    def to_dict(self):
        return asdict(self)


@dataclass
class IterationTrace:
    """Per-iteration record of a run.

    ``residuals[k]`` is ``e_k`` for ``k = 0..K`` (it includes the starting
    point), while ``step_norms``, ``projection_evals`` and ``times`` have one
    entry per performed iteration.
    """

    method: str
    residuals: list = field(default_factory=list)
    step_norms: list = field(default_factory=list)
    projection_evals: list = field(default_factory=list)
    times: list = field(default_factory=list)
    iterates: Optional[list] = None
    selections: list = field(default_factory=list)
    termination: Optional[str] = None
    wall_time_s: float = 0.0
    diagnostic_projection_evals: int = 0
    final_point: Optional[np.ndarray] = None

    @property
    def iterations(self) -> int:
        return len(self.step_norms)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "termination": self.termination,
            "iterations": self.iterations,
            "wall_time_s": self.wall_time_s,
            "residuals": list(self.residuals),
            "step_norms": list(self.step_norms),
            "projection_evals": list(self.projection_evals),
            "diagnostic_projection_evals": self.diagnostic_projection_evals,
            "times": list(self.times),
            "selections": [s.to_dict() for s in self.selections],
            "final_point": None if self.final_point is None else self.final_point.tolist(),
            "iterates": None if self.iterates is None else [x.tolist() for x in self.iterates],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "e_k", "step_norm", "proj_evals", "time"])
        w.writerow([0, repr(self.residuals[0]), "", 0, 0.0])
        for k in range(self.iterations):
            w.writerow([k + 1, repr(self.residuals[k + 1]), repr(self.step_norms[k]),
                        self.projection_evals[k], repr(self.times[k])])
        return buf.getvalue()


@dataclass
class ProductPoint:
    """A point of R^{nm}: ``blocks`` has shape ``(m, n)``."""

    blocks: np.ndarray

    def __post_init__(self):
        self.blocks = np.asarray(self.blocks, dtype=np.float64)
        if self.blocks.ndim != 2:
            raise ValueError("product point needs an (m, n) block array")

    @classmethod
    def diagonal(cls, x, m: int) -> "ProductPoint":
        return cls(np.tile(np.asarray(x, dtype=np.float64), (m, 1)))

    def average(self) -> np.ndarray:
        return self.blocks.mean(axis=0)


def residual(problem: FeasibilityProblem, x) -> float:
    x = as_vector(x, problem.dimension)
    return float(sum(np.linalg.norm(s.project(x) - x) for s in problem.sets))


def _residual_and_projections(problem, x):
    proj = [s.project(x) for s in problem.sets]
    return float(sum(np.linalg.norm(p - x) for p in proj)), proj


# -- single steps ---------------------------------------------------------------

def sepm_step(problem: FeasibilityProblem, x) -> np.ndarray:
    """``P_m(...P_2(P_1(x)))``."""
    y = as_vector(x, problem.dimension)
    for s in problem.sets:
        y = s.project(y)
    return y


def sipm_step(problem: FeasibilityProblem, x) -> np.ndarray:
    x = as_vector(x, problem.dimension)
    return np.mean([s.project(x) for s in problem.sets], axis=0)


def crmp_step(problem: FeasibilityProblem, zp: ProductPoint) -> ProductPoint:
    """One CRM step in the product space for ``W = C_1 x ... x C_m`` and the diagonal ``D``.

    Returns ``circumcenter(z, R_W(z), R_D(R_W(z)))``.
    """
    z = zp.blocks
    if z.shape != (problem.m, problem.dimension):
        raise ValueError(f"product point has shape {z.shape}, "
                         f"expected {(problem.m, problem.dimension)}")
    pw = np.stack([s.project(zi) for s, zi in zip(problem.sets, z)])
    rw = 2.0 * pw - z
    rd = 2.0 * rw.mean(axis=0) - rw
    c = circumcenter(z.ravel(), rw.ravel(), rd.ravel())
    return ProductPoint(c.reshape(z.shape))


def ccrm_step(problem: FeasibilityProblem, policy: ControlPolicy, x, k: int,
              proj_x=None):
    """One successive cCRM step ``x -> T_{C_ell, C_r}(x)``.

    ``proj_x`` may carry already computed ``P_i(x)``; reusing them saves work
    but the mv-distance selection is still charged for them.
    Returns ``(x_next, record, n_projections)``.
    """
    x = as_vector(x, problem.dimension)
    if policy.m != problem.m:
        policy.bind(problem)
    sel = policy.select(problem, x, k, proj_x)
    rec = sel.record
    A, B = problem.sets[rec.ell], problem.sets[rec.r]
    count = sel.n_projections
    if sel.proj_x is not None:
        pb_x = sel.proj_x[rec.r]
    elif rec.r == rec.ell and sel.p_ell_x is not None:
        pb_x = sel.p_ell_x
    else:
        pb_x = B.project(x)
        count += 1
    zz = A.project(pb_x)
    w = 0.5 * (zz + B.project(zz))
    pa_w = A.project(w)
    pb_w = B.project(w)
    count += 4
    x_next = circumcenter(w, 2.0 * pa_w - w, 2.0 * pb_w - w)
    return x_next, rec, count


# -- driver -----------------------------------------------------------------------

def solve(problem: FeasibilityProblem, config: SolverConfig, x0,
          policy: Optional[ControlPolicy] = None) -> IterationTrace:
    """Run ``config.method`` from ``x0`` until ``e_k <= eps``, the steps are
    ``<= eps``, or ``max_iter`` iterations have been taken.

    The step test looks at the last ``config.step_window`` steps. By default
    that is one step, except for the cyclic controls where it is the policy's
    window ``q_bound``: a single pair can be already satisfied (zero step)
    while other sets are still violated.
    """
    x = as_vector(x0, problem.dimension).copy()
    eps = config.epsilon
    trace = IterationTrace(method=config.method_id)
    if config.record_iterates:
        trace.iterates = [x.copy()]
    if config.method == "ccrm":
        if policy is None:
            policy = make_policy(config.control, q_bound=config.q_bound, seed=config.seed)
        policy.bind(problem)
    m = problem.m
    window = config.step_window
    if window is None:
        window = (policy.q_bound or 1) if config.method == "ccrm" else 1
    small_run = 0

    t0 = time.perf_counter()
    z = ProductPoint.diagonal(x, m) if config.method == "crm-p" else None
    total = 0
    try:
        e, proj_x = _residual_and_projections(problem, x)
        trace.diagnostic_projection_evals += m
        trace.residuals.append(e)
        termination = RESIDUAL_SMALL if e <= eps else None
        k = 0
        while termination is None:
            if config.method == "ccrm":
                x_new, rec, cost = ccrm_step(problem, policy, x, k, proj_x)
                trace.selections.append(rec)
            elif config.method == "sepm":
                x_new, cost = sepm_step(problem, x), m
            elif config.method == "sipm":
                x_new, cost = sipm_step(problem, x), m
            else:
                z = crmp_step(problem, z)
                x_new, cost = z.average(), m
            total += cost
            step = float(np.linalg.norm(x_new - x))
            x = x_new
            e, proj_x = _residual_and_projections(problem, x)
            trace.diagnostic_projection_evals += m
            k += 1
            trace.residuals.append(e)
            trace.step_norms.append(step)
            trace.projection_evals.append(total)
            trace.times.append(time.perf_counter() - t0)
            if trace.iterates is not None:
                trace.iterates.append(x.copy())
            small_run = small_run + 1 if step <= eps else 0
            if e <= eps:
                termination = RESIDUAL_SMALL
            elif small_run >= window:
                termination = STEP_SMALL
            elif k >= config.max_iter:
                termination = ITER_LIMIT
    except CCRMError as exc:
        trace.wall_time_s = time.perf_counter() - t0
        trace.final_point = x
        trace.termination = "Error"
        raise SolverError(f"{config.method_id} aborted at iteration {len(trace.step_norms)}: {exc}",
                          trace=trace) from exc
    trace.wall_time_s = time.perf_counter() - t0
    trace.termination = termination
    trace.final_point = x
    return trace
