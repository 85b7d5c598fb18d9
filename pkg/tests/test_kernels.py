import os
import subprocess
import sys

import numpy as np
import pytest

from ccrm import _kernels
from ccrm._kernels import _fallback
from oracles import random_spd

compiled = pytest.importorskip("ccrm._kernels._core", reason="compiled extension not built")


def _ell_args(rng, n):
    A = random_spd(rng, n, cond=1e3)
    w, V = np.linalg.eigh(A)
    center = rng.standard_normal(n)
    z = center + rng.uniform(-20, 20, n)
    return np.ascontiguousarray(V), w, center, float(rng.uniform(0.1, 5)), z


def test_backends_agree_on_projection(rng):
    for _ in range(200):
        args = _ell_args(rng, int(rng.integers(2, 20)))
        xa, la, ra, _, sa = compiled.ellipsoid_project(*args, 1e-12, 200)
        xb, lb, rb, _, sb = _fallback.ellipsoid_project(*args, 1e-12, 200)
        assert sa == sb == _kernels.OK
        np.testing.assert_allclose(xa, xb, rtol=1e-12, atol=1e-12)


def test_backends_agree_on_circumcenter(rng):
    for _ in range(200):
        p = rng.standard_normal((3, int(rng.integers(2, 30))))
        ca, sa = compiled.circumcenter(*p, 1e-9)
        cb, sb = _fallback.circumcenter(*p, 1e-9)
        assert sa == sb == _kernels.OK
        np.testing.assert_allclose(ca, cb, rtol=1e-10, atol=1e-12)
    for pts in (([0.0, 0], [1, 0], [4, 0]), ([1.0, 1], [1, 1], [1, 1]), ([0.0, 0], [0, 0], [2, 2])):
        pts = [np.array(p, dtype=float) for p in pts]
        ca, sa = compiled.circumcenter(*pts, 1e-9)
        cb, sb = _fallback.circumcenter(*pts, 1e-9)
        assert sa == sb
        np.testing.assert_array_equal(ca, cb)


def test_inside_point_untouched(rng):
    V, w, center, r, _ = _ell_args(rng, 4)
    for mod in (compiled, _fallback):
        x, lam, _, it, status = mod.ellipsoid_project(V, w, center, r, center.copy(), 1e-12, 200)
        assert lam == 0.0 and it == 0 and status == _kernels.OK
        np.testing.assert_array_equal(x, center)


def test_env_forces_fallback():
    code = "import ccrm._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, CCRM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    env.pop("CCRM_PURE_PYTHON")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "cython"


def test_solver_end_to_end_on_both_backends():
    code = ("import numpy as np, ccrm; from ccrm.bench import draw_x0;"
            "i = ccrm.generate_instance(ccrm.EllipsoidGenConfig(8, 3, seed=3));"
            "t = ccrm.solve(i.problem, ccrm.SolverConfig(), draw_x0(8, 3));"
            "print(ccrm.BACKEND, t.iterations, *t.final_point.round(9))")
    outs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, CCRM_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        backend, *rest = res.stdout.split()
        outs[backend] = rest
    assert set(outs) == {"python", "cython"}
    assert outs["python"] == outs["cython"]
