# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: ellipsoid projection and three-point circumcenter.

Same signatures and status codes as ``_fallback.py``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef int OK = 0
cdef int NO_CONVERGENCE = 1
cdef int DEGENERATE = 2
cdef double _EPS = 2.220446049250313e-16


def ellipsoid_project(const double[:, ::1] V, const double[::1] w,
                      const double[::1] center, double r, const double[::1] z,
                      double tol, int max_iter):
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, j
    cdef double[::1] e = np.empty(n)
    cdef double[::1] we2 = np.empty(n)
    cdef double acc, g0, ee = 0.0, wmin = w[0]
    cdef double lo, hi, lam, G, dG, s, dphi, new, resid, inv_sqrt_r
    cdef int it = 0, status

    # e = V^T (z - center)
    for j in range(n):
        e[j] = 0.0
    for i in range(n):
        acc = z[i] - center[i]
        for j in range(n):
            e[j] += V[i, j] * acc
    g0 = -r
    for j in range(n):
        we2[j] = w[j] * e[j] * e[j]
        g0 += we2[j]
        ee += e[j] * e[j]
        if w[j] < wmin:
            wmin = w[j]
    if g0 <= 0.0:
        return np.array(z, dtype=np.float64), 0.0, g0, 0, OK

    inv_sqrt_r = 1.0 / sqrt(r)
    lo = 0.0
    hi = sqrt(ee / (wmin * r)) * (1.0 + 1e-12) + 1e-300
    lam = 0.0
    while it < max_iter:
        it += 1
        G = 0.0
        dG = 0.0
        for j in range(n):
            s = 1.0 / (1.0 + lam * w[j])
            G += we2[j] * s * s
            dG -= 2.0 * we2[j] * w[j] * s * s * s
        if G > r:
            lo = lam
        else:
            hi = lam
        dphi = -0.5 * dG / (G * sqrt(G))
        if dphi > 0.0:
            new = lam - (1.0 / sqrt(G) - inv_sqrt_r) / dphi
            if fabs(new - lam) <= 1e-12 * fabs(new):
                lam = min(max(new, lo), hi)
                break
        else:
            new = lo
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if hi - lo <= 4.0 * _EPS * hi:
            break
        lam = new

    resid = -r
    for j in range(n):
        s = 1.0 / (1.0 + lam * w[j])
        resid += we2[j] * s * s
        e[j] = e[j] * s
    status = OK if fabs(resid) <= tol else NO_CONVERGENCE

    out = np.empty(n)
    cdef double[::1] x = out
    for i in range(n):
        acc = center[i]
        for j in range(n):
            acc += V[i, j] * e[j]
        x[i] = acc
    return out, lam, resid, it, status


cdef inline double _dist2(const double[::1] a, const double[::1] b, Py_ssize_t n):
    cdef double acc = 0.0, d
    cdef Py_ssize_t i
    for i in range(n):
        d = a[i] - b[i]
        acc += d * d
    return acc


def circumcenter(const double[::1] p0, const double[::1] p1,
                 const double[::1] p2, double tol):
    cdef Py_ssize_t n = p0.shape[0]
    cdef Py_ssize_t i
    cdef double uu = 0.0, vv = 0.0, uv = 0.0, du, dv, amax = 1.0
    cdef double nu, nv, n12, thresh, cos, s, t
    out = np.empty(n)
    cdef double[::1] c = out

    for i in range(n):
        du = p1[i] - p0[i]
        dv = p2[i] - p0[i]
        uu += du * du
        vv += dv * dv
        uv += du * dv
        if fabs(p0[i]) > amax:
            amax = fabs(p0[i])
    nu = sqrt(uu)
    nv = sqrt(vv)
    thresh = 16.0 * _EPS * amax
    if nu <= thresh and nv <= thresh:
        for i in range(n):
            c[i] = p0[i]
        return out, OK
    if nu <= thresh:
        for i in range(n):
            c[i] = 0.5 * (p0[i] + p2[i])
        return out, OK
    if nv <= thresh:
        for i in range(n):
            c[i] = 0.5 * (p0[i] + p1[i])
        return out, OK
    n12 = sqrt(_dist2(p1, p2, n))
    if n12 <= thresh:
        for i in range(n):
            c[i] = 0.5 * (p0[i] + p1[i])
        return out, OK

    cos = uv / (nu * nv)
    if 1.0 - fabs(cos) <= 1e-12 * (1.0 + fabs(cos)):
        return _collinear(p0, p1, p2, nu, nv, n12, tol)

    t = (0.5 * nv - cos * 0.5 * nu) / (1.0 - cos * cos)
    s = 0.5 * nu - cos * t
    s /= nu
    t /= nv
    for i in range(n):
        c[i] = p0[i] + s * (p1[i] - p0[i]) + t * (p2[i] - p0[i])
    return out, OK


cdef _collinear(const double[::1] p0, const double[::1] p1,
                const double[::1] p2, double nu, double nv, double n12,
                double tol):
    cdef Py_ssize_t n = p0.shape[0]
    cdef Py_ssize_t i
    cdef const double[::1] a
    cdef const double[::1] b
    cdef const double[::1] third
    cdef double dist
    out = np.empty(n)
    cdef double[::1] c = out
    # same tie order as the fallback's max(): first maximal pair wins
    if nu >= nv and nu >= n12:
        a, b, third, dist = p0, p1, p2, nu
    elif nv >= n12:
        a, b, third, dist = p0, p2, p1, nv
    else:
        a, b, third, dist = p1, p2, p0, n12
    for i in range(n):
        c[i] = 0.5 * (a[i] + b[i])
    if fabs(sqrt(_dist2(c, third, n)) - 0.5 * dist) <= tol * (1.0 + dist):
        return out, OK
    return out, DEGENERATE
