"""Pure numpy versions of the hot kernels.

Behaviour must match ``_core.pyx`` to within rounding; both are exercised by
``tests/test_kernels.py``.
"""
import math

import numpy as np

# status codes shared with the compiled core
OK = 0
NO_CONVERGENCE = 1
DEGENERATE = 2

_EPS = np.finfo(float).eps


def ellipsoid_project(V, w, center, r, z, tol, max_iter):
    """Project ``z`` onto ``{x : (x-center)^T V diag(w) V^T (x-center) <= r}``.

    Solves the KKT system ``(I + lam*A) y = z - center`` for the multiplier
    ``lam >= 0`` by Newton's method on ``1/sqrt(G(lam)) - 1/sqrt(r)``, where
    ``G(lam) = sum_j w_j e_j^2 / (1 + lam w_j)^2`` and ``e = V^T (z - center)``.
    That function is concave and increasing, so Newton started at 0 climbs
    monotonically to the root; a bisection bracket guards against rounding.

    Returns ``(x, lam, residual, iterations, status)`` with
    ``residual = G(lam) - r``, which equals ``f(x)`` for the projected point.
    """
    e = V.T @ (z - center)
    we2 = w * e * e
    g0 = we2.sum() - r
    if g0 <= 0.0:
        return z.copy(), 0.0, g0, 0, OK

    inv_sqrt_r = 1.0 / math.sqrt(r)
    lo = 0.0
    # G(lam) <= |e|^2 / (lam^2 w_min), so G(hi) <= r
    hi = math.sqrt((e * e).sum() / (w.min() * r)) * (1.0 + 1e-12) + 1e-300
    lam = 0.0
    it = 0
    while it < max_iter:
        it += 1
        s = 1.0 / (1.0 + lam * w)
        G = (we2 * s * s).sum()
        dG = -2.0 * (we2 * w * s * s * s).sum()
        if G > r:
            lo = lam
        else:
            hi = lam
        dphi = -0.5 * dG / (G * math.sqrt(G))
        if dphi > 0.0:
            new = lam - (1.0 / math.sqrt(G) - inv_sqrt_r) / dphi
            if abs(new - lam) <= 1e-12 * abs(new):
                lam = min(max(new, lo), hi)
                break
        else:
            new = lo
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if hi - lo <= 4.0 * _EPS * hi:
            break
        lam = new

    s = 1.0 / (1.0 + lam * w)
    resid = (we2 * s * s).sum() - r
    status = OK if abs(resid) <= tol else NO_CONVERGENCE

    y = e / (1.0 + lam * w)
    x = center + V @ y
    return x, lam, resid, it, status


def circumcenter(p0, p1, p2, tol):
    """Circumcenter of three points; see ``ccrm.circum.circumcenter``.

    Returns ``(c, status)``.
    """
    u = p1 - p0
    v = p2 - p0
    nu = math.sqrt(u @ u)
    nv = math.sqrt(v @ v)
    scale = max(1.0, float(np.abs(p0).max()))
    thresh = 16.0 * _EPS * scale
    u0 = nu <= thresh
    v0 = nv <= thresh
    if u0 and v0:
        return p0.copy(), OK
    if u0:
        return 0.5 * (p0 + p2), OK
    if v0:
        return 0.5 * (p0 + p1), OK
    d12 = p2 - p1
    n12 = math.sqrt(d12 @ d12)
    if n12 <= thresh:
        return 0.5 * (p0 + p1), OK

    cos = (u @ v) / (nu * nv)
    # normalized Gram matrix [[1, cos], [cos, 1]] has singular values 1 -+ |cos|
    if 1.0 - abs(cos) <= 1e-12 * (1.0 + abs(cos)):
        # collinear: midpoint of the farthest pair, accepted only if the
        # third point is equidistant
        pairs = ((nu, p0, p1, p2), (nv, p0, p2, p1), (n12, p1, p2, p0))
        dist, a, b, third = max(pairs, key=lambda t: t[0])
        c = 0.5 * (a + b)
        if abs(math.sqrt((c - third) @ (c - third)) - 0.5 * dist) <= tol * (1.0 + dist):
            return c, OK
        return c, DEGENERATE

    # unknowns s = alpha*|u|, t = beta*|v|:  s + cos t = |u|/2, cos s + t = |v|/2;
    # |cos| < 1 so the unit diagonal is the full pivot
    t = (0.5 * nv - cos * 0.5 * nu) / (1.0 - cos * cos)
    s = 0.5 * nu - cos * t
    return p0 + (s / nu) * u + (t / nv) * v, OK
