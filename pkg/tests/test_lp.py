from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from mlst.lp import EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LinearProgram, Tableau, solve_lp


def two_level_lp():
    # variables t, y1, y2 ; t free
    lp = LinearProgram([1, 0, 0], lower=[None, 0, 0])
    lp.add_row([1, -2, 0], LE, 0)
    lp.add_row([1, -1, -2], LE, 0)
    lp.add_row([0, 1, -1], GE, 0)
    lp.add_row([0, 1, 1], EQ, 1)
    return lp


@pytest.mark.parametrize("exact", [False, True])
def test_two_level_ratio_lp(exact):
    res = solve_lp(two_level_lp(), exact=exact)
    assert res.status == OPTIMAL
    if exact:
        assert res.value == Fraction(4, 3)
        assert res.x == [Fraction(4, 3), Fraction(2, 3), Fraction(1, 3)]
    else:
        assert res.value == pytest.approx(4 / 3, abs=1e-12)
        assert res.x[1:] == pytest.approx([2 / 3, 1 / 3], abs=1e-12)


def test_trivial_bound_and_unbounded():
    lp = LinearProgram([1])
    lp.add_row([1], LE, 5)
    assert solve_lp(lp).value == 5
    lp2 = LinearProgram([1])
    lp2.add_row([1], GE, 0)
    assert solve_lp(lp2).status == UNBOUNDED


def test_infeasible():
    lp = LinearProgram([1, 1])
    lp.add_row([1, 1], LE, 1)
    lp.add_row([1, 1], GE, 2)
    assert solve_lp(lp).status == INFEASIBLE
    assert solve_lp(lp, exact=True).status == INFEASIBLE


def test_bounds_and_free_variables():
    # max x - y with -2 <= x <= 3, y free, x + y >= -1, y <= 4 via upper bound
    lp = LinearProgram([1, -1], lower=[-2, None], upper=[3, 4])
    lp.add_row([1, 1], GE, -1)
    res = solve_lp(lp, exact=True)
    assert res.value == 7 and res.x == [3, -4]


def test_bland_golden_vertex():
    # max x1 + x2 + x3 over x1 + x2 + x3 <= 1: a face of optima; Bland enters x1 first
    lp = LinearProgram([1, 1, 1])
    lp.add_row([1, 1, 1], LE, 1)
    for exact in (False, True):
        res = solve_lp(lp, exact=exact)
        assert res.x == [1, 0, 0]
        assert res.pivots == 1


def test_duals_of_two_level_lp():
    res = solve_lp(two_level_lp(), exact=True)
    # complementary slackness: row duals weight the binding rows only
    assert sum(res.duals[k] * r[2] for k, r in enumerate(two_level_lp().rows)) == res.value


def test_add_column_reoptimize():
    # max 0 subject to x0 = 1, then add a better column
    tab = Tableau([[1], [1]], [EQ, LE], [1, 3], [1], exact=True)
    assert tab.solve() == OPTIMAL and tab.value == 1
    tab.add_column([0, 1], 2)
    assert tab.reoptimize() == OPTIMAL
    assert tab.value == 1 + 2 * 2


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2 ** 32), m=st.integers(1, 5), n=st.integers(1, 5))
def test_against_highs(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 6, size=(m, n))
    b = rng.integers(0, 10, size=m)
    c = rng.integers(-4, 6, size=n)
    lp = LinearProgram(c.tolist())
    for row, rhs in zip(A.tolist(), b.tolist()):
        lp.add_row(row, LE, rhs)
    ours = solve_lp(lp, exact=True)
    # HiGHS presolve can report unbounded problems as infeasible; x = 0 is always feasible here
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs",
                  options={"presolve": False})
    if ref.status == 3:
        assert ours.status == UNBOUNDED
        return
    assert ref.status == 0 and ours.status == OPTIMAL
    assert float(ours.value) == pytest.approx(-ref.fun, abs=1e-9)
    x = np.array([float(v) for v in ours.x])
    assert np.all(A @ x <= b + 1e-12) and np.all(x >= 0)
    assert float(ours.value) == pytest.approx(float(c @ x), rel=1e-12, abs=1e-12)
    flt = solve_lp(lp)
    assert flt.value == pytest.approx(float(ours.value), abs=1e-9)
