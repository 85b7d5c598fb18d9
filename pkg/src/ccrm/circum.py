"""Circumcenters and the two-set centralized circumcentered-reflection operator.

For closed convex ``A`` and ``B``::

    Z(z)      = P_A(P_B(z))
    Ztilde(z) = (P_A(z) + P_B(z)) / 2
    Zbar(z)   = Ztilde(Z(z)) = (Z(z) + P_B(Z(z))) / 2      (P_A(Z) = Z)
    T(z)      = circumcenter(w, R_A(w), R_B(w)),  w = Zbar(z)

``Zbar(z)`` is centralized, i.e. ``<R_A(w) - w, R_B(w) - w> <= 0``, and for a
centralized ``w`` the circumcenter equals the projection of ``w`` onto the
intersection of the two supporting halfspaces at ``P_A(w)`` and ``P_B(w)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .exceptions import DegenerateCircumcenterError, DimensionError
from .sets import ConvexSet, Halfspace, as_vector

EQUIDISTANCE_TOL = 1e-9
CENTRALIZED_TOL = 1e-10


@dataclass(frozen=True)
class PointTriple:
    base: np.ndarray
    refl_a: np.ndarray
    refl_b: np.ndarray

    def __post_init__(self):
        if not (self.base.shape == self.refl_a.shape == self.refl_b.shape):
            raise DimensionError("triple members must share one dimension")


@dataclass(frozen=True)
class SupportingHalfspacePair:
    """Halfspaces supporting A and B at the projections of ``at``.

    ``None`` stands for the whole space (``at`` already in that set).
    """

    h_a: Optional[Halfspace]
    h_b: Optional[Halfspace]
    at: np.ndarray


def circumcenter(p0, p1, p2) -> np.ndarray:
    """Point of the affine hull of ``p0, p1, p2`` equidistant to all three.

    Coincident points reduce to the midpoint of the distinct pair (or the
    point itself). Three distinct collinear points raise
    :class:`DegenerateCircumcenterError` unless the midpoint of the farthest
    pair happens to be equidistant to the third.
    """
    p0 = np.ascontiguousarray(as_vector(p0))
    p1 = np.ascontiguousarray(as_vector(p1, p0.size))
    p2 = np.ascontiguousarray(as_vector(p2, p0.size))
    c, status = _kernels.circumcenter(p0, p1, p2, EQUIDISTANCE_TOL)
    if status == _kernels.DEGENERATE:
        raise DegenerateCircumcenterError(
            "three distinct collinear points have no circumcenter")
    return c


def circumcenter_of(triple: PointTriple) -> np.ndarray:
    return circumcenter(triple.base, triple.refl_a, triple.refl_b)


def seq_op_Z(set_a: ConvexSet, set_b: ConvexSet, z) -> np.ndarray:
    return set_a.project(set_b.project(z))


def simul_op_Ztilde(set_a: ConvexSet, set_b: ConvexSet, z) -> np.ndarray:
    return 0.5 * (set_a.project(z) + set_b.project(z))


def central_op_Zbar(set_a: ConvexSet, set_b: ConvexSet, z) -> np.ndarray:
    zz = seq_op_Z(set_a, set_b, z)
    # P_A(zz) == zz since zz is already in A
    return 0.5 * (zz + set_b.project(zz))


def is_centralized(set_a: ConvexSet, set_b: ConvexSet, z,
                   tol: float = CENTRALIZED_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    z = as_vector(z)
    da = set_a.reflect(z) - z
    db = set_b.reflect(z) - z
    slack = tol * (1.0 + np.linalg.norm(da) * np.linalg.norm(db))
    return float(da @ db) <= slack


def ccrm_operator_T(set_a: ConvexSet, set_b: ConvexSet, z) -> np.ndarray:
    """One centralized circumcentered-reflection step for the pair (A, B)."""
    w = central_op_Zbar(set_a, set_b, z)
    return circumcenter(w, set_a.reflect(w), set_b.reflect(w))


def ccrm_from_parts(w: np.ndarray, pa_w: np.ndarray, pb_w: np.ndarray) -> np.ndarray:
    """``T`` given ``w = Zbar(z)`` and its two projections (no new projections)."""
    return circumcenter(w, 2.0 * pa_w - w, 2.0 * pb_w - w)


def supporting_halfspaces(set_a: ConvexSet, set_b: ConvexSet, z) -> SupportingHalfspacePair:
    z = as_vector(z)

    def support(s):
        p = s.project(z)
        normal = z - p
        if not np.any(normal):
            return None
        return Halfspace(normal, float(normal @ p))

    return SupportingHalfspacePair(support(set_a), support(set_b), z)
