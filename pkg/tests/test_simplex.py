"""Simplex solver against scipy and hand-checked programs."""

from fractions import Fraction

import numpy as np
import pytest
import scipy.optimize

from loclab.simplex import solve_lp


def test_textbook_lp():
    # max 2x + 3y s.t. x + y <= 100, 6x + 3y <= 360, x + 2y <= 120
    res = solve_lp(
        [-2, -3],
        A_ub=[[1, 1], [6, 3], [1, 2]],
        b_ub=[100, 360, 120],
    )
    assert res.status == "optimal"
    assert res.value == pytest.approx(-200)
    assert list(res.x) == pytest.approx([40, 40])


def test_equality_constraints_exact():
    # min x + y s.t. x + 2y = 4, x, y >= 0 -> x = 0, y = 2
    res = solve_lp([1, 1], A_eq=[[1, 2]], b_eq=[4], exact=True)
    assert res.status == "optimal"
    assert res.value == Fraction(2)


def test_infeasible():
    res = solve_lp([1], A_eq=[[1], [1]], b_eq=[1, 2])
    assert res.status == "infeasible"


def test_unbounded():
    res = solve_lp([-1], A_ub=[[-1]], b_ub=[0])
    assert res.status == "unbounded"


def test_degenerate_no_cycle():
    # classic degenerate instance; Bland's rule must terminate
    res = solve_lp(
        [-0.75, 150, -0.02, 6],
        A_ub=[
            [0.25, -60, -0.04, 9],
            [0.5, -90, -0.02, 3],
            [0, 0, 1, 0],
        ],
        b_ub=[0, 0, 1],
    )
    assert res.status == "optimal"
    assert res.value == pytest.approx(-0.05)


def test_exact_matches_float():
    rng = np.random.default_rng(21)
    for _ in range(25):
        n, m = 4, 3
        c = rng.integers(-5, 6, size=n)
        A = rng.integers(-4, 5, size=(m, n))
        b = rng.integers(1, 10, size=m)
        f = solve_lp(c, A_ub=A.tolist(), b_ub=b.tolist())
        e = solve_lp(c, A_ub=A.tolist(), b_ub=b.tolist(), exact=True)
        assert f.status == e.status
        if f.status == "optimal":
            assert f.value == pytest.approx(float(e.value), abs=1e-9)


def test_random_lps_match_scipy():
    rng = np.random.default_rng(22)
    for trial in range(40):
        n = int(rng.integers(2, 6))
        m_ub = int(rng.integers(1, 5))
        m_eq = int(rng.integers(0, 2))
        c = rng.integers(-5, 6, size=n).tolist()
        A_ub = rng.integers(-4, 5, size=(m_ub, n)).tolist()
        b_ub = rng.integers(0, 10, size=m_ub).tolist()
        A_eq = rng.integers(-3, 4, size=(m_eq, n)).tolist() if m_eq else None
        b_eq = rng.integers(0, 6, size=m_eq).tolist() if m_eq else None
        ours = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
        # presolve off: HiGHS presolve can report unbounded LPs as infeasible
        ref = scipy.optimize.linprog(
            c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
            bounds=[(0, None)] * n, method="highs", options={"presolve": False},
        )
        if ref.status == 0:
            assert ours.status == "optimal", (trial, c, A_ub, b_ub, A_eq, b_eq)
            assert ours.value == pytest.approx(ref.fun, abs=1e-7)
        elif ref.status == 2:
            assert ours.status == "infeasible"
        elif ref.status == 3:
            assert ours.status == "unbounded"
