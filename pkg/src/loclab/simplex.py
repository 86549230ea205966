"""Small dense linear programming by two-phase simplex.

minimize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

Two arithmetic modes share one tableau implementation: exact Fractions
(object dtype) for rational data, float64 with a 1e-9 pivot tolerance
for larger sweeps.  Bland's rule throughout, so no cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray]
    value: Optional[object]


def _pivot(tableau, leave, enter):
    piv = tableau[leave, enter]
    tableau[leave, :] = tableau[leave, :] / piv
    for i in range(tableau.shape[0]):
        if i != leave:
            f = tableau[i, enter]
            if f != 0:
                tableau[i, :] = tableau[i, :] - f * tableau[leave, :]


def _bland(tableau, basis, tol):
    """Run simplex with Bland's rule; the last row holds reduced costs,
    the last column the RHS.  Mutates tableau and basis."""
    rows, cols = tableau.shape
    while True:
        enter = -1
        for j in range(cols - 1):
            if tableau[rows - 1, j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i in range(rows - 1):
            a = tableau[i, enter]
            if a > tol:
                ratio = tableau[i, cols - 1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(tableau, leave, enter)
        basis[leave] = enter


def solve_lp(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    exact: bool = False,
) -> LPResult:
    conv = Fraction if exact else float
    zero = conv(0)
    one = conv(1)
    tol = zero if exact else 1e-9
    feas_tol = zero if exact else 1e-7

    c = [conv(v) for v in c]
    n = len(c)
    rows_ub = [[conv(v) for v in row] for row in (A_ub if A_ub is not None else [])]
    rhs_ub = [conv(v) for v in (b_ub if b_ub is not None else [])]
    rows_eq = [[conv(v) for v in row] for row in (A_eq if A_eq is not None else [])]
    rhs_eq = [conv(v) for v in (b_eq if b_eq is not None else [])]
    m_ub, m_eq = len(rows_ub), len(rows_eq)
    m = m_ub + m_eq
    n_slack = m_ub

    # rows in standard form with nonnegative RHS
    body, rhs, basic_slack = [], [], []
    for i, (row, b) in enumerate(zip(rows_ub, rhs_ub)):
        slack = [zero] * n_slack
        slack[i] = one
        full = row + slack
        if b < zero:
            full = [-v for v in full]
            b = -b
            basic_slack.append(-1)  # flipped slack is -1, not basic
        else:
            basic_slack.append(n + i)
        body.append(full)
        rhs.append(b)
    for row, b in zip(rows_eq, rhs_eq):
        full = list(row) + [zero] * n_slack
        if b < zero:
            full = [-v for v in full]
            b = -b
        body.append(full)
        rhs.append(b)
        basic_slack.append(-1)

    art_rows = [i for i in range(m) if basic_slack[i] < 0]
    n_art = len(art_rows)
    n_real = n + n_slack
    n_total = n_real + n_art

    dtype = object if exact else float
    tableau = np.full((m + 1, n_total + 1), zero, dtype=dtype)
    basis = [0] * m
    for i in range(m):
        for j, v in enumerate(body[i]):
            tableau[i, j] = v
        tableau[i, -1] = rhs[i]
        basis[i] = basic_slack[i]
    for a_idx, i in enumerate(art_rows):
        tableau[i, n_real + a_idx] = one
        basis[i] = n_real + a_idx

    if n_art:
        # phase 1: minimize the artificial sum
        for j in range(n_total + 1):
            s = zero
            for i in art_rows:
                s = s + tableau[i, j]
            tableau[m, j] = -s
        for a_idx in range(n_art):
            tableau[m, n_real + a_idx] = zero
        status = _bland(tableau, basis, tol)
        if status != "optimal" or -tableau[m, -1] > feas_tol:
            return LPResult("infeasible", None, None)
        # drive artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= n_real:
                for j in range(n_real):
                    if tableau[i, j] > tol or tableau[i, j] < -tol:
                        _pivot(tableau, i, j)
                        basis[i] = j
                        break
        # remaining artificial rows are redundant constraints: drop them,
        # then drop the artificial columns entirely
        keep_rows = [i for i in range(m) if basis[i] < n_real] + [m]
        keep_cols = list(range(n_real)) + [n_total]
        tableau = tableau[np.ix_(keep_rows, keep_cols)]
        basis = [basis[i] for i in keep_rows[:-1]]
        m = len(basis)

    # phase 2 objective
    tableau[m, :] = zero
    for j in range(n):
        tableau[m, j] = c[j]
    for i in range(m):
        f = tableau[m, basis[i]]
        if f != 0:
            tableau[m, :] = tableau[m, :] - f * tableau[i, :]

    status = _bland(tableau, basis, tol)
    if status == "unbounded":
        return LPResult("unbounded", None, None)

    x = np.full(n, zero, dtype=dtype)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i, -1]
    value = sum((ci * xi for ci, xi in zip(c, x)), zero)
    return LPResult("optimal", x, value)
