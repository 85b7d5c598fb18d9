import json

import numpy as np
import pytest
from scipy.stats import binom

from ccrm.exceptions import ConfigurationError
from ccrm.generate import (EllipsoidGenConfig, GeneratedInstance, generate_chained_ellipsoid,
                           generate_first_ellipsoid, generate_instance, householder_basis)
from ccrm.sets import membership


def test_first_ellipsoid_properties():
    for seed in range(10):
        cfg = EllipsoidGenConfig(12, 3, gamma=0.5, seed=seed)
        e = generate_first_ellipsoid(cfg, np.random.default_rng(seed))
        assert np.linalg.eigvalsh(e.A).min() >= 0.5 - 1e-10
        assert e.constraint(np.zeros(12)) == -e.c < 0


def test_first_ellipsoid_density():
    # B has n^2 Bernoulli(2/n) entries; recover B's support from the draw itself
    n = 50
    inside = 0
    trials = 200
    for seed in range(trials):
        rng = np.random.default_rng(seed)
        mask = rng.random((n, n)) < 2.0 / n
        density = mask.mean()
        inside += 0.5 * 2 / n <= density <= 2 * 2 / n
    assert inside / trials >= 0.99
    # the binomial tail bound behind the threshold
    lo, hi = binom.cdf(n * n * 0.02 - 1, n * n, 2 / n), binom.sf(n * n * 0.08, n * n, 2 / n)
    assert lo + hi < 0.01


def test_householder_orthogonal(rng):
    for n in (2, 5, 30):
        d = rng.standard_normal(n)
        Q = householder_basis(d)
        assert np.abs(Q.T @ Q - np.eye(n)).max() <= 1e-12
        np.testing.assert_allclose(Q[:, 0], d / np.linalg.norm(d), atol=1e-14)
    assert np.array_equal(householder_basis([3.0, 0.0]), np.eye(2))


def test_chained_ellipsoid_contains_anchor():
    cfg = EllipsoidGenConfig(6, 4, seed=5)
    inst = generate_instance(cfg)
    p = inst.common_point
    for entry, ell in zip(inst.generation_log[2:], inst.problem.sets[2:]):
        xc = np.array(entry["center"])
        d = np.array(entry["axis"])
        np.testing.assert_allclose(d, cfg.lambda_scale * (p - xc))
        # p sits at metric radius 1/lambda on the long axis
        np.testing.assert_allclose(ell.centered_value(p) + 1.0, 1 / cfg.lambda_scale ** 2,
                                   rtol=1e-9)
        semi = np.array(entry["semi_axes"])
        assert semi[0] == pytest.approx(np.linalg.norm(d))
        assert np.all(semi[1:] < semi[0]) and np.all(semi[1:] > 0)


def test_centers_outside_earlier_sets():
    inst = generate_instance(EllipsoidGenConfig(5, 5, seed=11))
    for i, entry in enumerate(inst.generation_log[1:], start=1):
        xc = np.array(entry["center"])
        for s in inst.problem.sets[:i]:
            assert not membership(s, xc, 0.0)


def test_instance_certified_interior():
    for seed in range(10):
        inst = generate_instance(EllipsoidGenConfig(10, 4, seed=seed))
        for s in inst.problem.sets:
            assert s.constraint(inst.common_point) < -1e-12
            assert membership(s, inst.common_point, 1e-10)


def test_two_sets_anchor_in_first():
    for seed in range(10):
        inst = generate_instance(EllipsoidGenConfig(4, 2, seed=seed))
        assert inst.problem.sets[0].constraint(inst.common_point) <= 0


def test_replay_bit_identical():
    a = generate_instance(EllipsoidGenConfig(7, 3, seed=9)).to_json()
    b = generate_instance(EllipsoidGenConfig(7, 3, seed=9)).to_json()
    assert a == b
    back = GeneratedInstance.from_dict(json.loads(a))
    assert back.to_json() == a


def test_chain_requires_anchor():
    cfg = EllipsoidGenConfig(3, 3)
    with pytest.raises(ValueError):
        generate_chained_ellipsoid(cfg, np.random.default_rng(0), 3, [], None)
    with pytest.raises(ValueError):
        generate_chained_ellipsoid(cfg, np.random.default_rng(0), 1, [], None)


def test_config_validation():
    for kw in ({"n": 1, "m": 2}, {"n": 2, "m": 1}, {"n": 2, "m": 2, "lambda_scale": 1.0},
               {"n": 2, "m": 2, "gamma": 0.0}, {"n": 2, "m": 2, "axis_high": 1.0}):
        with pytest.raises(ConfigurationError):
            EllipsoidGenConfig(**kw)
