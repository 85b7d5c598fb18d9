"""Post-hoc checks on traces: residuals, Fejér certificates, empirical rates.

Rates are measured on a distance proxy ``d_k = |x^k - xbar|``. ``xbar`` is
either supplied (for example by :func:`limit_surrogate`, a continuation run
at a much tighter tolerance) or taken as the last iterate. The superlinear
flag is a heuristic: the ratios ``d_{k+1}/d_k`` over the final window must be
strictly decreasing and end at or below ``SUPERLINEAR_LAST_RATIO``. A trace
that reaches ``xbar`` exactly (finite termination) is flagged superlinear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .solvers import IterationTrace, SolverConfig, residual, solve
from .sets import as_vector

SUPERLINEAR_LAST_RATIO = 0.1

__all__ = ["residual", "FejerCertificate", "RateReport", "fejer_certify",
           "estimate_rates", "rates_from_distances", "limit_surrogate"]


@dataclass
class FejerCertificate:
    reference_point: np.ndarray
    max_violation: float
    per_step_margins: list
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_dict(self):
        return {"reference_point": self.reference_point.tolist(),
                "max_violation": self.max_violation,
                "per_step_margins": list(self.per_step_margins),
                "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class RateReport:
    distances: list
    q_ratios: list
    q_estimate: float
    r_estimate: float
    superlinear_flag: bool
    window: int
    finite_termination: bool = False

    def to_dict(self):
        return {"distances": list(self.distances), "q_ratios": list(self.q_ratios),
                "q_estimate": self.q_estimate, "r_estimate": self.r_estimate,
                "superlinear_flag": self.superlinear_flag, "window": self.window,
                "finite_termination": self.finite_termination}


def _iterates(trace) -> list:
    if isinstance(trace, IterationTrace):
        if trace.iterates is None:
            raise ValueError("trace has no recorded iterates; solve with record_iterates=True")
        return trace.iterates
    return [np.asarray(x, dtype=np.float64) for x in trace]


def fejer_certify(trace, s, tol: float = 1e-10) -> FejerCertificate:
    """Largest increase of ``|x^k - s|`` between consecutive iterates."""
    xs = _iterates(trace)
    s = as_vector(s)
    dist = [float(np.linalg.norm(x - s)) for x in xs]
    margins = [b - a for a, b in zip(dist, dist[1:])]
    worst = max(margins) if margins else 0.0
    return FejerCertificate(s, max(worst, 0.0), margins, tol)


def rates_from_distances(d: Sequence[float], window: int = 3) -> RateReport:
    if window < 3:
        raise ValueError("window must be at least 3")
    d = [float(v) for v in d]
    if any(v < 0 for v in d):
        raise ValueError("distances must be nonnegative")
    finite = False
    if 0.0 in d:
        first_zero = d.index(0.0)
        d = d[:first_zero + 1]
        finite = True
    if not finite and len(d) <= window:
        raise ValueError(f"need more than {window} distances, got {len(d)}")
    if len(d) < 2:
        # started at the limit
        return RateReport(d, [], 0.0, 0.0, True, window, True)
    ratios = [b / a for a, b in zip(d, d[1:])]
    tail = ratios[-window:]
    q = max(tail)
    K = len(d) - 1
    j = max(1, (3 * K) // 4)
    r = d[j] ** (1.0 / j) if d[j] > 0 else 0.0
    decreasing = all(b < a for a, b in zip(tail, tail[1:]))
    superlinear = decreasing and tail[-1] <= SUPERLINEAR_LAST_RATIO
    return RateReport(d, ratios, q, r, superlinear, window, finite)


def estimate_rates(trace, reference=None, window: int = 3) -> RateReport:
    """Empirical Q/R rates of the iterates of ``trace`` towards ``reference``.

    Without a reference the last iterate is used, and the final (zero)
    distance is dropped so that it does not masquerade as a zero ratio.
    """
    xs = _iterates(trace)
    if reference is None:
        ref = xs[-1]
        xs = xs[:-1]
    else:
        ref = as_vector(reference)
    return rates_from_distances([float(np.linalg.norm(x - ref)) for x in xs], window)


def limit_surrogate(problem, config: SolverConfig, x, epsilon: float = 1e-12,
                    max_iter: Optional[int] = None) -> np.ndarray:
    """Continue ``config``'s method from ``x`` at tolerance ``epsilon``."""
    cont = replace(config, epsilon=epsilon, record_iterates=False,
                   max_iter=max_iter or config.max_iter)
    return solve(problem, cont, x).final_point
