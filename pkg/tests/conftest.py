import numpy as np
import pytest

from ccrm.sets import AffineSubspace, Ball, FeasibilityProblem, Halfspace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_lines():
    """x2 = 0 and x1 = x2 in the plane; they meet at the origin."""
    a = AffineSubspace([0.0, 0.0], [[1.0, 0.0]])
    b = AffineSubspace([0.0, 0.0], [[1.0, 1.0]])
    return a, b


@pytest.fixture
def quadrant():
    return FeasibilityProblem([Halfspace([1.0, 0.0], 0.0), Halfspace([0.0, 1.0], 0.0)])


@pytest.fixture
def balls3():
    return FeasibilityProblem([Ball([0.0, 0.0], 1.0), Ball([1.0, 0.0], 1.0),
                               Ball([0.5, 0.8], 1.0)], certified_point=[0.5, 0.1])


_ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(number, ok, detail):
        _ACCEPTANCE[number] = (ok, detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
