import numpy as np
import pytest

from ccrm.diagnostics import (estimate_rates, fejer_certify, limit_surrogate,
                              rates_from_distances, residual)
from ccrm.generate import EllipsoidGenConfig, generate_instance
from ccrm.sets import Ball, FeasibilityProblem, Halfspace
from ccrm.solvers import SolverConfig, solve


def test_residual_examples():
    q = FeasibilityProblem([Halfspace([1, 0], 0), Halfspace([0, 1], 0)])
    assert residual(q, [3, 4]) == 7
    assert residual(q, [-1, 0]) == 0
    assert residual(FeasibilityProblem([Ball([0, 0], 1)]), [2, 0]) == 1


def test_fejer_constant_and_negative_control():
    s = np.array([1.0, 2.0])
    cert = fejer_certify([s, s, s], s, tol=1e-10)
    assert cert.passed and cert.max_violation == 0
    bad = fejer_certify([s + 3, s + 1, s + 2, s], s, tol=1e-10)
    assert not bad.passed
    assert bad.max_violation == pytest.approx(np.sqrt(2))
    assert bad.to_dict()["passed"] is False


def test_fejer_needs_iterates():
    prob = FeasibilityProblem([Ball([0, 0], 1)])
    with pytest.raises(ValueError):
        fejer_certify(solve(prob, SolverConfig("sepm"), [2, 0]), [0, 0])


def test_fejer_on_generated_runs():
    inst = generate_instance(EllipsoidGenConfig(10, 3, seed=4))
    for mid in ("ccrm-mv-distance", "sepm"):
        t = solve(inst.problem, SolverConfig.from_method_id(mid, record_iterates=True),
                  np.full(10, -60.0))
        assert fejer_certify(t, inst.common_point, 1e-10).passed


def test_geometric_rate():
    r = rates_from_distances([2.0 ** -k for k in range(30)])
    assert r.q_estimate == pytest.approx(0.5, abs=1e-12)
    assert not r.superlinear_flag
    assert r.r_estimate == pytest.approx(0.5, rel=1e-12)


def test_superlinear_rate():
    r = rates_from_distances([2.0 ** -(k * k) for k in range(12)])
    np.testing.assert_allclose(r.q_ratios, [2.0 ** -(2 * k + 1) for k in range(11)])
    assert r.superlinear_flag


def test_truncation_at_first_zero():
    r = rates_from_distances([1.0, 0.1, 0.0, 0.0, 0.5])
    assert r.finite_termination and r.superlinear_flag
    assert r.q_ratios == [0.1, 0.0]
    with pytest.raises(ValueError):
        rates_from_distances([1.0, 0.5, 0.25])
    with pytest.raises(ValueError):
        rates_from_distances([1.0, 0.5, 0.25, 0.1], window=2)


def test_scaled_trace_reports_rho(rng):
    xbar = rng.standard_normal(4)
    v = rng.standard_normal(4)
    rho = 0.37
    xs = [xbar + rho ** k * v for k in range(12)]
    r = estimate_rates(xs, reference=xbar, window=4)
    assert abs(r.q_estimate - rho) <= 1e-9


def test_without_reference_uses_last_iterate():
    xs = [np.array([2.0 ** -k + 1.0]) for k in range(20)] + [np.array([1.0])]
    r = estimate_rates(xs)
    assert r.q_estimate == pytest.approx(0.5, abs=1e-12)
    assert len(r.distances) == 20


def test_limit_surrogate_is_tighter():
    inst = generate_instance(EllipsoidGenConfig(10, 3, seed=6))
    cfg = SolverConfig("sepm")
    t = solve(inst.problem, cfg, np.full(10, 50.0))
    xb = limit_surrogate(inst.problem, cfg, t.final_point)
    assert residual(inst.problem, xb) <= max(1e-12, 1e-3 * t.final_residual)
