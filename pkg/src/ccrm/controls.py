"""Control sequences choosing the set pair ``(ell, r)`` for each cCRM step.

Indices are 0-based. Policies:

``cyclic``
    ``ell(k) = k mod m``.
``almost-cyclic``
    ``ell`` follows a schedule in which every window of ``q_bound``
    consecutive entries visits every index. By default the schedule is a
    fresh seeded permutation of ``0..m-1`` per sweep, which needs
    ``q_bound = 2m - 1``.
``mv-distance``
    ``ell = argmax_i |x - P_i(x)|``, ``r = argmax_i |P_ell(x) - P_i(P_ell(x))|``.
``mv-function``
    ``ell = argmax_i f_i(x)``, ``r = argmax_i f_i(P_ell(x))``.

For the cyclic kinds ``r = (ell + 1) mod m``. Ties go to the smallest index.
For ``m >= 2`` the ``r`` argmax runs over ``i != ell``; this only matters
when every candidate ties, and keeps the pair distinct.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConfigurationError

POLICY_KINDS = ("cyclic", "almost-cyclic", "mv-distance", "mv-function")


@dataclass(frozen=True)
class SelectionRecord:
    k: int
    ell: int
    r: int
    criterion_values: tuple = ()
    r_values: tuple = ()

    def to_dict(self):
        return {"k": self.k, "ell": self.ell, "r": self.r,
                "criterion_values": list(self.criterion_values),
                "r_values": list(self.r_values)}


@dataclass
class Selection:
    """A record plus whatever projections the selection had to compute."""

    record: SelectionRecord
    n_projections: int = 0
    proj_x: Optional[list] = None          # P_i(x) for all i
    p_ell_x: Optional[np.ndarray] = None   # P_ell(x)


def _argmax(values, exclude=None) -> int:
    best, arg = -np.inf, None
    for i, v in enumerate(values):
        if i == exclude:
            continue
        if arg is None or v > best:
            best, arg = v, i
    return arg


class ControlPolicy:
    kind = "abstract"
    q_bound: Optional[int] = None

    def __init__(self):
        self.m = None

    def bind(self, problem) -> "ControlPolicy":
        """Validate against ``problem`` and reset any cursor state."""
        self.m = problem.m
        return self

    def select(self, problem, x, k, proj_x=None) -> Selection:
        raise NotImplementedError

    def _partner(self, ell):
        return (ell + 1) % self.m


class Cyclic(ControlPolicy):
    kind = "cyclic"

    def bind(self, problem):
        super().bind(problem)
        self.q_bound = self.m
        return self

    def select(self, problem, x, k, proj_x=None):
        ell = k % self.m
        return Selection(SelectionRecord(k, ell, self._partner(ell)))


class AlmostCyclic(ControlPolicy):
    kind = "almost-cyclic"

    def __init__(self, q_bound: Optional[int] = None, schedule: Optional[Sequence[int]] = None,
                 seed: int = 0):
        super().__init__()
        self._requested_q = q_bound
        self._period = None if schedule is None else [int(i) for i in schedule]
        self.seed = seed
        self._schedule: list = []
        self._rng = None

    def bind(self, problem):
        super().bind(problem)
        m = self.m
        if self._period is not None:
            if any(not 0 <= i < m for i in self._period):
                raise ConfigurationError("schedule entries must lie in 0..m-1")
            q = self._requested_q or len(self._period)
            if q < m:
                raise ConfigurationError("q_bound must be at least m")
            extended = self._period * (2 + q // max(1, len(self._period)))
            if not _windows_cover(extended, m, q):
                raise ConfigurationError(
                    f"periodic schedule does not cover all indices in every window of {q}")
            self.q_bound = q
        else:
            need = 2 * m - 1
            if self._requested_q is not None and self._requested_q < need:
                raise ConfigurationError(
                    f"shuffled sweeps need q_bound >= 2m-1 = {need}; pass a schedule "
                    "for tighter bounds")
            self.q_bound = self._requested_q or need
        self._schedule = []
        self._rng = np.random.default_rng(self.seed)
        return self

    def _ell(self, k):
        if self._period is not None:
            return self._period[k % len(self._period)]
        while len(self._schedule) <= k:
            self._schedule.extend(int(i) for i in self._rng.permutation(self.m))
        return self._schedule[k]

    def select(self, problem, x, k, proj_x=None):
        ell = self._ell(k)
        return Selection(SelectionRecord(k, ell, self._partner(ell)))


class MostViolatedDistance(ControlPolicy):
    kind = "mv-distance"

    def select(self, problem, x, k, proj_x=None):
        sets = problem.sets
        if proj_x is None:
            proj_x = [s.project(x) for s in sets]
        dist = [float(np.linalg.norm(x - p)) for p in proj_x]
        ell = _argmax(dist)
        y = proj_x[ell]
        r_vals = []
        for i, s in enumerate(sets):
            r_vals.append(0.0 if i == ell else float(np.linalg.norm(y - s.project(y))))
        r = _argmax(r_vals, exclude=ell if len(sets) > 1 else None)
        m = len(sets)
        return Selection(SelectionRecord(k, ell, r, tuple(dist), tuple(r_vals)),
                         n_projections=m + (m - 1), proj_x=proj_x, p_ell_x=y)


class MostViolatedFunction(ControlPolicy):
    kind = "mv-function"

    def bind(self, problem):
        super().bind(problem)
        for i, s in enumerate(problem.sets):
            if not s.has_constraint:
                raise ConfigurationError(
                    f"set {i} ({s.kind}) has no defining function; "
                    "the function-value control cannot be used")
        return self

    def select(self, problem, x, k, proj_x=None):
        sets = problem.sets
        fx = [s.constraint(x) for s in sets]
        ell = _argmax(fx)
        y = sets[ell].project(x)
        r_vals = [s.constraint(y) for s in sets]
        r = _argmax(r_vals, exclude=ell if len(sets) > 1 else None)
        return Selection(SelectionRecord(k, ell, r, tuple(fx), tuple(r_vals)),
                         n_projections=1, p_ell_x=y)


def make_policy(kind: str, *, q_bound=None, schedule=None, seed: int = 0) -> ControlPolicy:
    if kind == "cyclic":
        return Cyclic()
    if kind == "almost-cyclic":
        return AlmostCyclic(q_bound=q_bound, schedule=schedule, seed=seed)
    if kind == "mv-distance":
        return MostViolatedDistance()
    if kind == "mv-function":
        return MostViolatedFunction()
    raise ConfigurationError(f"unknown control {kind!r}; expected one of {POLICY_KINDS}")


def select_pair(policy: ControlPolicy, problem, x, k: int) -> SelectionRecord:
    if policy.m != problem.m:
        policy.bind(problem)
    return policy.select(problem, np.asarray(x, dtype=float), k).record


def _windows_cover(ells, m, q) -> bool:
    ells = list(ells)
    full = set(range(m))
    if len(ells) < q:
        return set(ells) >= full
    return all(set(ells[i:i + q]) >= full for i in range(len(ells) - q + 1))


def verify_window_coverage(policy: ControlPolicy, history, m: Optional[int] = None,
                           q: Optional[int] = None) -> bool:
    """True iff every ``q``-window of the ``ell`` values in ``history`` covers 0..m-1.

    ``history`` holds :class:`SelectionRecord` objects or bare indices.
    """
    m = m if m is not None else policy.m
    q = q if q is not None else policy.q_bound
    if m is None or q is None:
        raise ConfigurationError("policy has no window bound; bind it or pass m and q")
    ells = [h.ell if isinstance(h, SelectionRecord) else int(h) for h in history]
    if not ells:
        raise ValueError("history must be nonempty")
    return _windows_cover(ells, m, q)
