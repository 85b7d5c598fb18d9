"""Convex sets with orthogonal projection and reflection.

Every set exposes ``project``, ``reflect``, ``residual`` (the quantity compared
against a tolerance by :func:`membership`) and, where one exists, a convex
defining function ``constraint`` with ``C = {x : constraint(x) <= 0}``.

Sets are immutable after construction. All arithmetic is float64.

JSON form::

    {"kind": "halfspace", "a": [...], "b": 1.0}
    {"kind": "ball", "center": [...], "radius": 1.0}
    {"kind": "box", "lower": [...], "upper": [...]}
    {"kind": "affine", "point": [...], "directions": [[...], ...]}
    {"kind": "ellipsoid", "A": [[...], ...], "b": [...], "c": 1.0,
     "center": [...], "rhs": 1.0}          # center/rhs optional

Matrices are row-major lists of rows. Sublevel sets built from Python
callables have no JSON form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .exceptions import DimensionError, InvalidSetError, ProjectionError

ELLIPSOID_MAX_ITER = 200
SYMMETRY_RTOL = 1e-12


def as_vector(z, n: Optional[int] = None) -> np.ndarray:
    """Coerce to a finite 1-D float64 array, optionally checking its length."""
    v = np.asarray(z, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if n is not None and v.size != n:
        raise DimensionError(f"vector has dimension {v.size}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class ConvexSet:
    """Base class. Subclasses set ``dim`` and implement ``_project``."""

    kind = "abstract"
    dim: int

    def project(self, z) -> np.ndarray:
        return self._project(as_vector(z, self.dim))

    def reflect(self, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        return 2.0 * self._project(z) - z

    def residual(self, z) -> float:
        """Membership residual: distance to the set unless overridden."""
        z = as_vector(z, self.dim)
        return float(np.linalg.norm(z - self._project(z)))

    def constraint(self, z) -> float:
        raise InvalidSetError(
            f"{type(self).__name__} has no scalar defining function; "
            "use the distance residual instead")

    @property
    def has_constraint(self) -> bool:
        return True

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _project(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Halfspace(ConvexSet):
    """``{x : <a, x> <= b}``."""

    kind = "halfspace"

    def __init__(self, a, b: float):
        self.a = _frozen(as_vector(a))
        self.b = float(b)
        self.dim = self.a.size
        self._aa = float(self.a @ self.a)
        if not self._aa > 0.0:
            raise InvalidSetError("halfspace normal must be nonzero")

    def _project(self, z):
        viol = float(self.a @ z) - self.b
        if viol <= 0.0:
            return z.copy()
        return z - (viol / self._aa) * self.a

    def residual(self, z):
        z = as_vector(z, self.dim)
        return max(0.0, float(self.a @ z) - self.b) / np.sqrt(self._aa)

    def constraint(self, z):
        return float(self.a @ as_vector(z, self.dim)) - self.b

    def to_dict(self):
        return {"kind": self.kind, "a": self.a.tolist(), "b": self.b}

    def __repr__(self):
        return f"Halfspace(a={self.a.tolist()}, b={self.b})"


class Ball(ConvexSet):
    kind = "ball"

    def __init__(self, center, radius: float):
        self.center = _frozen(as_vector(center))
        self.radius = float(radius)
        self.dim = self.center.size
        if not self.radius > 0.0:
            raise InvalidSetError("ball radius must be positive")

    def _project(self, z):
        d = z - self.center
        nd = float(np.linalg.norm(d))
        if nd <= self.radius:
            return z.copy()
        return self.center + (self.radius / nd) * d

    def constraint(self, z):
        d = as_vector(z, self.dim) - self.center
        return float(d @ d) - self.radius ** 2

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


class Box(ConvexSet):
    kind = "box"

    def __init__(self, lower, upper):
        self.lower = _frozen(as_vector(lower))
        self.upper = _frozen(as_vector(upper, self.lower.size))
        self.dim = self.lower.size
        if np.any(self.lower > self.upper):
            raise InvalidSetError("box needs lower <= upper componentwise")

    def _project(self, z):
        if np.all(z >= self.lower) and np.all(z <= self.upper):
            return z.copy()
        return np.clip(z, self.lower, self.upper)

    def constraint(self, z):
        z = as_vector(z, self.dim)
        return float(np.max(np.maximum(self.lower - z, z - self.upper)))

    def to_dict(self):
        return {"kind": self.kind, "lower": self.lower.tolist(), "upper": self.upper.tolist()}


def _orthonormalize(D: np.ndarray, n: int) -> np.ndarray:
    """Gram-Schmidt with one reorthogonalization pass; drops dependent columns."""
    basis = []
    for col in D.T:
        v = col.astype(np.float64, copy=True)
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            continue
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > 1e-10 * norm0:
            basis.append(v / nv)
    if not basis:
        return np.zeros((n, 0))
    return np.column_stack(basis)


class AffineSubspace(ConvexSet):
    """``point + span(directions)``; ``directions`` is a list of vectors."""

    kind = "affine"

    def __init__(self, point, directions: Sequence = ()):
        self.point = _frozen(as_vector(point))
        self.dim = self.point.size
        D = np.asarray(directions, dtype=np.float64)
        if D.size == 0:
            D = np.zeros((0, self.dim))
        D = D.reshape(-1, self.dim)
        self.basis = _frozen(_orthonormalize(D.T, self.dim))

    @classmethod
    def from_equations(cls, M, rhs):
        """``{x : M x = rhs}`` (must be consistent)."""
        M = np.atleast_2d(np.asarray(M, dtype=np.float64))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
        x0, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        if not np.allclose(M @ x0, rhs, atol=1e-10):
            raise InvalidSetError("inconsistent affine equations")
        _, s, vt = np.linalg.svd(M)
        rank = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0.0))))
        return cls(x0, vt[rank:])

    def _project(self, z):
        d = z - self.point
        return self.point + self.basis @ (self.basis.T @ d)

    @property
    def has_constraint(self):
        return False

    def to_dict(self):
        return {"kind": self.kind, "point": self.point.tolist(),
                "directions": self.basis.T.tolist()}


class Ellipsoid(ConvexSet):
    """``{x : x^T A x + 2 b^T x - c <= 0}`` with ``A`` symmetric positive definite.

    Projection solves ``(I + lam A) x = z - lam b`` for the multiplier
    ``lam >= 0`` with ``f(x(lam)) = 0`` (safeguarded Newton, see
    ``_kernels``). Internally the set is kept in centred eigen-coordinates,
    ``(x - center)^T A (x - center) <= rhs``.
    """

    kind = "ellipsoid"

    def __init__(self, A, b, c: float, *, center=None, rhs=None):
        A = np.array(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"ellipsoid matrix must be square, got {A.shape}")
        n = A.shape[0]
        if not np.all(np.isfinite(A)):
            raise InvalidSetError("ellipsoid matrix has non-finite entries")
        scale = max(float(np.abs(A).max()), np.finfo(float).tiny)
        if np.abs(A - A.T).max() > SYMMETRY_RTOL * scale:
            raise InvalidSetError("ellipsoid matrix is not symmetric")
        A = 0.5 * (A + A.T)
        w, V = np.linalg.eigh(A)
        if not w[0] > 0.0:
            raise InvalidSetError(
                f"ellipsoid matrix is not positive definite (min eigenvalue {w[0]:.3e})")
        self.A = _frozen(A)
        self.b = _frozen(as_vector(b, n))
        self.c = float(c)
        self.dim = n
        self._w = _frozen(w)
        self._V = np.ascontiguousarray(V)
        self._V.setflags(write=False)
        if center is None:
            center = -(V @ ((V.T @ self.b) / w))
        self.center = _frozen(as_vector(center, n))
        self.rhs = float(self.c - self.b @ self.center) if rhs is None else float(rhs)
        if self.rhs < 0.0:
            raise InvalidSetError("ellipsoid is empty (c + b^T A^-1 b < 0)")
        self._tol = 1e-12 * (1.0 + abs(self.c))

    @classmethod
    def from_center(cls, center, shape, rhs: float = 1.0):
        """``{x : (x - center)^T shape (x - center) <= rhs}``."""
        center = as_vector(center)
        shape = np.asarray(shape, dtype=np.float64)
        shape = 0.5 * (shape + shape.T)
        b = -(shape @ center)
        c = rhs - float(center @ shape @ center)
        return cls(shape, b, c, center=center, rhs=rhs)

    def _project(self, z):
        if self.rhs == 0.0:
            return self.center.copy()
        x, lam, resid, it, status = _kernels.ellipsoid_project(
            self._V, self._w, self.center, self.rhs, z, self._tol, ELLIPSOID_MAX_ITER)
        if status != _kernels.OK:
            raise ProjectionError(
                f"ellipsoid multiplier solve did not converge after {it} iterations "
                f"(|f| = {abs(resid):.3e})", residual=resid, iterations=it)
        return x

    def centered_value(self, z) -> float:
        """``f(z)`` evaluated in centred coordinates (less cancellation)."""
        d = as_vector(z, self.dim) - self.center
        return float(d @ self.A @ d) - self.rhs

    def residual(self, z):
        return max(0.0, self.constraint(z))

    def constraint(self, z):
        z = as_vector(z, self.dim)
        return float(z @ self.A @ z + 2.0 * (self.b @ z)) - self.c

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist(),
                "c": self.c, "center": self.center.tolist(), "rhs": self.rhs}


# alternate name
EllipsoidQuadratic = Ellipsoid


class Sublevel(ConvexSet):
    """``{x : f(x) <= 0}`` for a convex callable ``f``.

    ``projector`` is used when given. Otherwise the projection is computed
    iteratively with SLSQP, using ``grad`` (a subgradient) for the constraint
    Jacobian.
    """

    kind = "sublevel"

    def __init__(self, func: Callable, grad: Callable, dim: int,
                 projector: Optional[Callable] = None, tol: float = 1e-12):
        self.func = func
        self.grad = grad
        self.dim = int(dim)
        self.projector = projector
        self.tol = tol

    def _project(self, z):
        if self.func(z) <= 0.0:
            return z.copy()
        if self.projector is not None:
            return as_vector(self.projector(z), self.dim)
        from scipy.optimize import minimize

        res = minimize(
            lambda x: 0.5 * float((x - z) @ (x - z)), z, jac=lambda x: x - z,
            constraints=[{"type": "ineq", "fun": lambda x: -self.func(x),
                          "jac": lambda x: -np.asarray(self.grad(x))}],
            method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
        viol = self.func(res.x)
        if viol > 1e-9:
            raise ProjectionError(f"sublevel projection failed: {res.message}",
                                  residual=viol, iterations=res.nit)
        return res.x

    def residual(self, z):
        return max(0.0, float(self.func(as_vector(z, self.dim))))

    def constraint(self, z):
        return float(self.func(as_vector(z, self.dim)))

    def to_dict(self):
        raise TypeError("sublevel sets defined by callables cannot be serialized")


_KINDS = {
    "halfspace": lambda d: Halfspace(d["a"], d["b"]),
    "ball": lambda d: Ball(d["center"], d["radius"]),
    "box": lambda d: Box(d["lower"], d["upper"]),
    "affine": lambda d: AffineSubspace(d["point"], d.get("directions", ())),
    "ellipsoid": lambda d: Ellipsoid(d["A"], d["b"], d["c"],
                                     center=d.get("center"), rhs=d.get("rhs")),
}


def set_from_dict(d: dict) -> ConvexSet:
    try:
        build = _KINDS[d["kind"]]
    except KeyError:
        raise InvalidSetError(f"unknown set kind {d.get('kind')!r}") from None
    return build(d)


# -- functional interface ---------------------------------------------------

def project(s: ConvexSet, z) -> np.ndarray:
    return s.project(z)


def reflect(s: ConvexSet, z) -> np.ndarray:
    return s.reflect(z)


def membership(s: ConvexSet, z, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return s.residual(z) <= tol


def evaluate_constraint(s: ConvexSet, z) -> float:
    return s.constraint(z)


@dataclass
class FeasibilityProblem:
    """Find a point in the intersection of ``sets``."""

    sets: list
    certified_point: Optional[np.ndarray] = None
    instance_id: str = ""
    dimension: int = field(init=False)

    def __post_init__(self):
        self.sets = list(self.sets)
        if len(self.sets) < 1:
            raise InvalidSetError("a feasibility problem needs at least one set")
        dims = {s.dim for s in self.sets}
        if len(dims) != 1:
            raise DimensionError(f"sets have mixed dimensions {sorted(dims)}")
        self.dimension = dims.pop()
        if self.certified_point is not None:
            p = as_vector(self.certified_point, self.dimension)
            self.certified_point = p
            for i, s in enumerate(self.sets):
                if not membership(s, p, 1e-10):
                    raise InvalidSetError(f"certified point is not in set {i}")

    @property
    def m(self) -> int:
        return len(self.sets)

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "dimension": self.dimension,
            "sets": [s.to_dict() for s in self.sets],
            "certified_point": None if self.certified_point is None
            else self.certified_point.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeasibilityProblem":
        return cls([set_from_dict(s) for s in d["sets"]],
                   certified_point=d.get("certified_point"),
                   instance_id=d.get("instance_id", ""))
