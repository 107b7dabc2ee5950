from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncflow.lp import EQ, GE, LE, MAX, MIN, LpError, LpProblem, check_certificate, solve_lp


def test_min_with_lower_bound():
    lp = LpProblem()
    x = lp.add_var()
    lp.add_row({x: 1}, GE, 3)
    lp.set_objective({x: 1}, MIN)
    res = solve_lp(lp)
    assert res.optimal and res.x[x] == 3 and res.value == 3


def test_infeasible():
    lp = LpProblem()
    x = lp.add_var()
    lp.add_row({x: 1}, GE, 1)
    lp.add_row({x: 1}, LE, 0)
    lp.set_objective({}, MIN)
    assert solve_lp(lp).status == "infeasible"


def test_unbounded():
    lp = LpProblem()
    x = lp.add_var()
    lp.add_row({x: 1}, GE, 0)
    lp.set_objective({x: 1}, MAX)
    assert solve_lp(lp).status == "unbounded"


def test_free_variable_and_equality():
    lp = LpProblem()
    x = lp.add_var(lower=None)
    y = lp.add_var()
    lp.add_row({x: 1, y: 1}, EQ, -2)
    lp.add_row({y: 1}, LE, 5)
    lp.set_objective({x: 1}, MIN)
    res = solve_lp(lp)
    assert res.optimal and res.x[x] == -7 and res.x[y] == 5


def test_bad_inputs():
    lp = LpProblem()
    with pytest.raises(LpError):
        lp.add_var(lower=1)
    with pytest.raises(LpError):
        lp.add_row({}, "<", 0)


def test_fractional_vertex():
    # max x + y s.t. 2x + y <= 2, x + 2y <= 2 -> (2/3, 2/3)
    lp = LpProblem()
    x, y = lp.add_var(), lp.add_var()
    lp.add_row({x: 2, y: 1}, LE, 2)
    lp.add_row({x: 1, y: 2}, LE, 2)
    lp.set_objective({x: 1, y: 1}, MAX)
    res = solve_lp(lp)
    assert res.x[x] == res.x[y] == Fraction(2, 3)
    assert res.value == Fraction(4, 3)


@st.composite
def small_lps(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    coef = st.integers(-3, 3)
    lp = LpProblem()
    xs = [lp.add_var(lower=draw(st.sampled_from([0, 0, None]))) for _ in range(n)]
    for _ in range(m):
        lp.add_row({j: draw(coef) for j in xs}, draw(st.sampled_from([LE, GE, EQ])), draw(st.integers(-4, 4)))
    # Box every variable so optima exist when feasible.
    for j in xs:
        lp.add_row({j: 1}, LE, 5)
        lp.add_row({j: 1}, GE, -5)
    lp.set_objective({j: draw(coef) for j in xs}, draw(st.sampled_from([MIN, MAX])))
    return lp


@given(small_lps())
def test_certificate_and_determinism(lp):
    res = solve_lp(lp)
    if res.optimal:
        assert check_certificate(lp, res) == []
    again = solve_lp(lp)
    assert (again.status, again.x, again.value) == (res.status, res.x, res.value)


@given(small_lps())
def test_optimum_matches_vertex_enumeration(lp):
    """Compare against brute force over all vertices of the boxed polytope."""
    import itertools

    res = solve_lp(lp)
    n = lp.n_vars
    rows = [(r, rel, b) for r, rel, b in lp.rows]
    eqs = [(r, b) for r, rel, b in rows] + [({j: 1}, 0) for j in range(n) if lp.lower[j] == 0]
    best = None
    for combo in itertools.combinations(range(len(eqs)), n):
        pt = _solve_square([eqs[i] for i in combo], n)
        if pt is None or not _feasible(lp, pt):
            continue
        val = sum(c * pt[j] for j, c in lp.objective.items())
        if best is None or (val < best if lp.sense == MIN else val > best):
            best = val
    if best is None:
        assert res.status == "infeasible"
    else:
        assert res.optimal and res.value == best


def _feasible(lp, x):
    for j, lo in enumerate(lp.lower):
        if lo == 0 and x[j] < 0:
            return False
    for r, rel, b in lp.rows:
        s = sum(c * x[j] for j, c in r.items())
        if (rel == LE and s > b) or (rel == GE and s < b) or (rel == EQ and s != b):
            return False
    return True


def _solve_square(eqs, n):
    A = [[Fraction(r.get(j, 0)) for j in range(n)] + [Fraction(b)] for r, b in eqs]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col] / A[col][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]
