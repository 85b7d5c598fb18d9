"""Random intersecting-ellipsoid instances with a certified common point.

Construction (all draws from ``numpy.random.default_rng(seed)``):

1. ``xi_1 = {x : x^T A_1 x + 2 x^T b_1 - c_1 <= 0}`` with
   ``A_1 = gamma I + B^T B``, ``B`` sparse (density ``2/n``, N(0,1) entries),
   ``b_1 ~ U[0,1]^n`` and ``c_1 = 2 b_1^T A_1 b_1 + 1`` so that ``0`` is inside.
2. ``xi_2``: centre ``x_c`` drawn from ``U[-box, box]^n`` outside ``xi_1``,
   longest semi-axis ``d = lambda (P_1(x_c) - x_c)``. The anchor ``p`` lies on
   the segment from ``x_c`` through ``P_1(x_c)``, past ``P_1(x_c)`` by half of
   the smaller of the chord of ``xi_1`` along that ray and ``|d| - |P_1(x_c) - x_c|``,
   so ``p`` is strictly inside both ``xi_1`` and ``xi_2``.
3. ``xi_i``, ``i >= 3``: centre outside all earlier sets, ``d = lambda (p - x_c)``.

For ``i >= 2`` the set is ``{x : (x-x_c)^T (M^T M)^{-1} (x-x_c) <= 1}`` with
``M = Q diag(|d|, u) Q^T``, ``u_j ~ U[0.1, 0.9] |d|`` and ``Q`` the Householder
reflector sending ``e_1`` to ``d/|d|``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError, GenerationError
from .sets import Ellipsoid, FeasibilityProblem, as_vector

MAX_CENTER_DRAWS = 10_000
MAX_RESEEDS = 20
INTERIOR_MARGIN = 1e-12


@dataclass
class EllipsoidGenConfig:
    n: int
    m: int
    gamma: float = 1.0
    lambda_scale: float = 1.1
    seed: int = 0
    center_box: float = 5.0
    axis_low: float = 0.1
    axis_high: float = 0.9

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise ConfigurationError("need n >= 2 and m >= 2")
        if not self.gamma > 0:
            raise ConfigurationError("gamma must be positive")
        if not self.lambda_scale > 1:
            raise ConfigurationError("lambda_scale must exceed 1")
        if not 0 < self.axis_low <= self.axis_high < 1:
            raise ConfigurationError("need 0 < axis_low <= axis_high < 1")


@dataclass
class GeneratedInstance:
    problem: FeasibilityProblem
    common_point: np.ndarray
    config: EllipsoidGenConfig
    generation_log: list = field(default_factory=list)
    attempt: int = 0

    def to_dict(self) -> dict:
        return {
            "format": "ccrm-instance/1",
            "config": asdict(self.config),
            "seed": self.config.seed,
            "attempt": self.attempt,
            "problem": self.problem.to_dict(),
            "common_point": self.common_point.tolist(),
            "generation_log": self.generation_log,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratedInstance":
        cfg = EllipsoidGenConfig(**d["config"])
        problem = FeasibilityProblem.from_dict(d["problem"])
        return cls(problem, as_vector(d["common_point"]), cfg,
                   d.get("generation_log", []), d.get("attempt", 0))


def householder_basis(direction) -> np.ndarray:
    """Orthogonal symmetric ``Q`` with first column ``direction/|direction|``."""
    d = np.asarray(direction, dtype=np.float64)
    q1 = d / np.linalg.norm(d)
    n = q1.size
    v = q1.copy()
    v[0] -= 1.0
    vv = float(v @ v)
    if vv <= 1e-30:
        return np.eye(n)
    # I - 2 v v^T / |v|^2 maps e_1 to q1 when v = q1 - e_1
    return np.eye(n) - (2.0 / vv) * np.outer(v, v)


def generate_first_ellipsoid(config: EllipsoidGenConfig, rng) -> Ellipsoid:
    n = config.n
    density = 2.0 / n
    mask = rng.random((n, n)) < density
    B = np.where(mask, rng.standard_normal((n, n)), 0.0)
    A = config.gamma * np.eye(n) + B.T @ B
    b = rng.random(n)
    c = 2.0 * float(b @ A @ b) + 1.0
    return Ellipsoid(A, b, c)


def _shape_from_axis(config, rng, d):
    """(shape matrix (M^T M)^{-1}, semi-axes, Q) for longest semi-axis ``d``."""
    nd = float(np.linalg.norm(d))
    u = rng.uniform(config.axis_low, config.axis_high, config.n - 1) * nd
    axes = np.concatenate(([nd], u))
    Q = householder_basis(d)
    shape = (Q / axes ** 2) @ Q.T
    return shape, axes, Q


def _draw_center(config, rng, existing):
    for _ in range(MAX_CENTER_DRAWS):
        xc = rng.uniform(-config.center_box, config.center_box, config.n)
        if all(s.constraint(xc) > 0.0 for s in existing):
            return xc
    raise GenerationError(
        f"no centre outside the existing {len(existing)} sets after {MAX_CENTER_DRAWS} draws")


def generate_chained_ellipsoid(config: EllipsoidGenConfig, rng, index: int, existing,
                               anchor: Optional[np.ndarray]):
    """Build ``xi_index`` (``index >= 2``). Returns ``(set, anchor, log_entry)``.

    For ``index == 2`` the anchor is created; afterwards it is passed through.
    """
    if index < 2:
        raise ValueError("chained ellipsoids start at index 2")
    if index >= 3 and anchor is None:
        raise ValueError("an anchor is required from the third ellipsoid on")
    lam = config.lambda_scale
    first = existing[0]
    for _ in range(MAX_CENTER_DRAWS):
        xc = _draw_center(config, rng, existing)
        if index == 2:
            foot = first.project(xc)
            gap = foot - xc
            delta = float(np.linalg.norm(gap))
            nu = gap / delta
            d = lam * gap
            # second root of f_1(foot + t nu) = 0 (the first is t = 0)
            chord = -2.0 * float(nu @ (first.A @ foot + first.b)) / float(nu @ first.A @ nu)
            t = 0.5 * min(chord, (lam - 1.0) * delta)
            p = foot + t * nu
        else:
            p = anchor
            d = lam * (p - xc)
        shape, axes, Q = _shape_from_axis(config, rng, d)
        ell = Ellipsoid.from_center(xc, shape, 1.0)
        if ell.centered_value(p) < -INTERIOR_MARGIN and (
                index > 2 or first.constraint(p) < -INTERIOR_MARGIN):
            log = {"index": index, "center": xc.tolist(), "axis": d.tolist(),
                   "semi_axes": axes.tolist()}
            return ell, p, log
    raise GenerationError(f"could not place ellipsoid {index} with the anchor inside")


def _generate_once(config: EllipsoidGenConfig, seed) -> GeneratedInstance:
    rng = np.random.default_rng(seed)
    first = generate_first_ellipsoid(config, rng)
    sets = [first]
    log = [{"index": 1, "A": first.A.tolist(), "b": first.b.tolist(), "c": first.c}]
    anchor = None
    for i in range(2, config.m + 1):
        ell, anchor, entry = generate_chained_ellipsoid(config, rng, i, sets, anchor)
        sets.append(ell)
        log.append(entry)
    if any(s.constraint(anchor) >= -INTERIOR_MARGIN for s in sets):
        raise GenerationError("anchor is not strictly interior to every set")
    problem = FeasibilityProblem(sets, certified_point=anchor,
                                 instance_id=f"ell-n{config.n}-m{config.m}-s{config.seed}")
    return GeneratedInstance(problem, anchor, config, log)


def generate_instance(config: EllipsoidGenConfig, log=None) -> GeneratedInstance:
    """Deterministic in ``config``. A failed attempt is retried with the
    sub-seed ``(seed, attempt)``; the attempt number is stored for replay."""
    last = None
    for attempt in range(MAX_RESEEDS):
        seed = config.seed if attempt == 0 else [config.seed, attempt]
        try:
            inst = _generate_once(config, seed)
        except GenerationError as exc:
            last = exc
            if log is not None:
                log.warning("instance seed=%s attempt %d failed: %s", config.seed, attempt, exc)
            continue
        inst.attempt = attempt
        return inst
    raise GenerationError(f"generation failed after {MAX_RESEEDS} attempts: {last}")
