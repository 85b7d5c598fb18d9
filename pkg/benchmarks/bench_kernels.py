"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--reps 2000] [--dims 5 20 50]

Prints per-call times (microseconds) and the speedup for the ellipsoid
projection, the circumcenter, and one full mv-distance solve.
"""
import argparse
import timeit

import numpy as np

from ccrm._kernels import _fallback

try:
    from ccrm._kernels import _core
except ImportError:  # extension not built
    _core = None


def _ellipsoid_args(rng, n):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = np.exp(rng.uniform(0, np.log(100), n))
    center = rng.standard_normal(n)
    z = center + rng.uniform(-20, 20, n)
    return np.ascontiguousarray(Q), w, center, 1.0, z, 1e-12, 200


def _time(fn, args, reps):
    return min(timeit.repeat(lambda: fn(*args), number=reps, repeat=3)) / reps * 1e6


def _solve_time(backend, n, m, reps):
    import ccrm._kernels as k
    from ccrm.bench import draw_x0
    from ccrm.generate import EllipsoidGenConfig, generate_instance
    from ccrm.solvers import SolverConfig, solve

    saved = k.ellipsoid_project, k.circumcenter
    k.ellipsoid_project, k.circumcenter = backend.ellipsoid_project, backend.circumcenter
    try:
        inst = generate_instance(EllipsoidGenConfig(n, m, seed=0))
        x0 = draw_x0(n, 0)
        cfg = SolverConfig("sepm")
        return _time(lambda: solve(inst.problem, cfg, x0), (), max(1, reps // 100))
    finally:
        k.ellipsoid_project, k.circumcenter = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--dims", type=int, nargs="+", default=[5, 20, 50])
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>5}{'cython us':>12}{'python us':>12}{'speedup':>9}")
    for n in args.dims:
        rows = [("ellipsoid_project", _ellipsoid_args(rng, n)),
                ("circumcenter", (*rng.standard_normal((3, n)), 1e-9))]
        for name, call_args in rows:
            tc = _time(getattr(_core, name), call_args, args.reps)
            tp = _time(getattr(_fallback, name), call_args, args.reps)
            print(f"{name:<22}{n:>5}{tc:>12.2f}{tp:>12.2f}{tp / tc:>9.1f}")
    for n, m in ((10, 3), (20, 5)):
        tc = _solve_time(_core, n, m, args.reps)
        tp = _solve_time(_fallback, n, m, args.reps)
        print(f"{'solve sepm m=' + str(m):<22}{n:>5}{tc:>12.1f}{tp:>12.1f}{tp / tc:>9.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
