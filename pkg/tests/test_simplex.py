"""Dense bounded-variable simplex vs scipy.optimize.linprog."""

import numpy as np
import pytest
from scipy.optimize import linprog

from acsmimo._simplex import solve_lp


def random_lp(rng, m, n, fix_some=False):
    A = rng.uniform(-2, 3, size=(m, n))
    b = rng.uniform(0.5, 6, size=m)
    c = rng.uniform(-1, 2, size=n)
    lb = np.zeros(n)
    ub = np.ones(n)
    if fix_some:
        for j in rng.choice(n, size=max(1, n // 4), replace=False):
            v = float(rng.integers(0, 2))
            lb[j] = ub[j] = v
    return c, A, b, lb, ub


def scipy_solve(c, A, b, lb, ub):
    res = linprog(-c, A_ub=A, b_ub=b, bounds=list(zip(lb, ub)), method="highs")
    return res


@pytest.mark.parametrize("fix_some", [False, True])
def test_matches_scipy_on_random_instances(fix_some):
    rng = np.random.default_rng(42 if fix_some else 7)
    for trial in range(60):
        m = int(rng.integers(1, 12))
        n = int(rng.integers(1, 12))
        c, A, b, lb, ub = random_lp(rng, m, n, fix_some)
        ours = solve_lp(c, A, b, lb, ub)
        ref = scipy_solve(c, A, b, lb, ub)
        if ref.status == 2:
            assert ours.status == "infeasible"
            continue
        assert ref.status == 0
        assert ours.status == "optimal"
        assert ours.objective == pytest.approx(-ref.fun, abs=1e-7)
        assert np.all(A @ ours.x <= b + 1e-7)
        assert np.all(ours.x >= lb - 1e-9) and np.all(ours.x <= ub + 1e-9)


def test_negative_rhs_requires_phase_one():
    # x1 + x2 >= 1 written as -x1 - x2 <= -1
    c = np.array([-1.0, -2.0])  # maximize -> x = (1, 0)
    A = np.array([[-1.0, -1.0]])
    b = np.array([-1.0])
    res = solve_lp(c, A, b, np.zeros(2), np.ones(2))
    assert res.status == "optimal"
    assert res.x == pytest.approx([1.0, 0.0], abs=1e-9)
    assert res.objective == pytest.approx(-1.0, abs=1e-9)


def test_infeasible_detected():
    A = np.array([[1.0], [-1.0]])
    b = np.array([0.2, -0.8])  # x <= 0.2 and x >= 0.8
    res = solve_lp(np.array([1.0]), A, b, np.zeros(1), np.ones(1))
    assert res.status == "infeasible"


def test_degenerate_equalities():
    # equality via paired inequalities, plus a redundant row
    c = np.array([3.0, 1.0, 0.5])
    A = np.array(
        [
            [1.0, 1.0, 1.0],
            [-1.0, -1.0, -1.0],
            [1.0, 1.0, 1.0],
            [1.0, 0.0, 0.0],
        ]
    )
    b = np.array([1.5, -1.5, 1.5, 1.0])
    res = solve_lp(c, A, b, np.zeros(3), np.ones(3))
    ref = scipy_solve(c, A, b, np.zeros(3), np.ones(3))
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-ref.fun, abs=1e-8)


def test_all_variables_fixed():
    c = np.array([1.0, 1.0])
    A = np.array([[1.0, 1.0]])
    b = np.array([2.0])
    lb = np.array([1.0, 0.0])
    ub = np.array([1.0, 0.0])
    res = solve_lp(c, A, b, lb, ub)
    assert res.status == "optimal"
    assert res.x == pytest.approx([1.0, 0.0])
