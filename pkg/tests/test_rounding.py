from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncflow.dual import check_dual_feasible, solve_dual
from ncflow.generate import random_instance
from ncflow.geodesic import edge_lengths, path_length
from ncflow.model import Instance, dual_objective
from ncflow.oracle import enumerate_t_paths
from ncflow.rounding import (
    EQ,
    LE,
    Constraint,
    RoundingError,
    TwoVarSystem,
    build_gamma,
    build_rho_system,
    round_dual,
    solve_two_var_system,
    witness_labels,
)

STAR_L = {"s": 0, "t": 0, "u": 0, "v": 7}


def _c(coefs, rel, rhs):
    return Constraint(tuple(coefs), rel, Fraction(rhs), "test")


def test_symmetric_sum_forces_half():
    sys = TwoVarSystem(["x", "y"], [
        _c([("x", 1), ("y", -1)], LE, 0),
        _c([("y", 1), ("x", -1)], LE, 0),
        _c([("x", 1), ("y", 1)], EQ, 1),
    ])
    assert solve_two_var_system(sys) == {"x": Fraction(1, 2), "y": Fraction(1, 2)}


def test_difference_system_is_integral():
    sys = TwoVarSystem(["a", "b", "c"], [
        _c([("a", 1), ("b", -1)], LE, 3),
        _c([("b", 1), ("c", -1)], LE, -2),
        _c([("c", 1)], LE, 4),
        _c([("a", -1)], LE, 7),
    ])
    x = solve_two_var_system(sys)
    assert all(v.denominator == 1 for v in x.values())
    assert sys.satisfied_by(x) == []


def test_infeasible_system():
    sys = TwoVarSystem(["x"], [_c([("x", 1)], LE, 0), _c([("x", -1)], LE, -1)])
    with pytest.raises(RoundingError):
        solve_two_var_system(sys)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.sampled_from([1, -1]),
                          st.sampled_from([1, -1]), st.integers(-4, 4), st.sampled_from(["<=", "==", ">="])),
                max_size=8))
def test_doubling_transform_is_half_integral_when_feasible(rows):
    names = [f"x{i}" for i in range(4)]
    cons = []
    for i, j, a, b, rhs, rel in rows:
        coefs = [(names[i], a)] if i == j else [(names[i], a), (names[j], b)]
        cons.append(_c(coefs, rel, rhs))
    sys = TwoVarSystem(names, cons)
    try:
        x = solve_two_var_system(sys)
    except RoundingError:
        return
    assert all(v.denominator in (1, 2) for v in x.values())
    assert sys.satisfied_by(x) == []


def test_star_gamma_has_no_virtual_edges(star):
    g = build_gamma(star, STAR_L, 10)
    assert g.virtual == {} and set(g.nodes) == set(star.nodes)
    assert len(g.Pi["v"]) == 3


def test_single_outside_detour():
    # s-y-t is the geodesic; x (cost 5) is a detour off it.
    nodes = ("s", "y", "t", "x")
    inst = Instance(nodes, (("s", "y"), ("y", "t"), ("s", "x"), ("x", "t")), {"s", "t"},
                    {v: 1 for v in nodes}, {"s": 1, "y": 1, "t": 1, "x": 5})
    l = {v: 0 for v in nodes}
    g = build_gamma(inst, l, 3)
    assert g.virtual == {("s", "t"): 5}
    l_hat = round_dual(inst, l, 3)
    assert l_hat["x"] == 0


def test_terminal_only_families(star):
    zero = {v: 0 for v in star.nodes}
    g = build_gamma(star, zero, 2)
    assert set(g.nodes) == {"s", "t", "u"}
    assert all(mu == 1 for mu in g.virtual.values())
    assert build_rho_system(g, zero).families() == {"i", "ii", "v"}


def test_star_system(star):
    g = build_gamma(star, STAR_L, 10)
    sys = build_rho_system(g, STAR_L)
    at_v = [c for c in sys.constraints if c.family == "iii" and any(v[2] == "v" for v, _ in c.coefs)]
    assert len(at_v) == 2 * 3
    assert all(c.rhs.denominator == 1 for c in sys.constraints)


def test_star_rounding(star):
    assert round_dual(star, STAR_L, 10) == {"s": 0, "t": 0, "u": 0, "v": 7}


def test_half_integral_input_keeps_objective(star):
    l = solve_dual(star, 10).l
    assert dual_objective(round_dual(star, l, 10), star) == dual_objective(l, star)


def check_rounded(inst, l, lam):
    l_hat = round_dual(inst, l, lam)
    assert all(x >= 0 and (2 * x).denominator == 1 for x in l_hat.values())
    assert all(l_hat[v] == 0 for v in inst.nodes if l[v] == 0)
    ell = edge_lengths(inst, l)
    for P in enumerate_t_paths(inst):
        total = sum(inst.cost[v] + l_hat[v] for v in P)
        assert total >= lam
        if path_length(P, ell, inst) == lam:
            assert total == lam
    assert dual_objective(l_hat, inst) == dual_objective(l, inst)
    assert check_dual_feasible(inst, l_hat, lam)
    return l_hat


@given(st.integers(0, 10**6), st.integers(2, 8), st.integers(0, 25))
def test_rounding_properties(seed, n, lam):
    inst = random_instance(seed, n)
    check_rounded(inst, solve_dual(inst.doubled(), lam).l, lam)


def test_fractional_duals_get_rounded():
    """Sweep seeds until several LP duals are genuinely fractional, and round them."""
    seen = 0
    for seed in range(400):
        inst = random_instance(seed, 3 + seed % 6)
        lam = 2 + seed % 20
        l = solve_dual(inst.doubled(), lam).l
        if all(Fraction(x).denominator == 1 for x in l.values()):
            continue
        check_rounded(inst, l, lam)
        seen += 1
    assert seen >= 10


@given(st.integers(0, 10**6), st.integers(2, 8), st.integers(0, 25))
def test_shortest_path_witness_satisfies_system(seed, n, lam):
    inst = random_instance(seed, n)
    l = solve_dual(inst.doubled(), lam).l
    g = build_gamma(inst, l, lam)
    sys = build_rho_system(g, l)
    w = witness_labels(g, l)
    assert set(w) == set(sys.variables)
    assert sys.satisfied_by(w) == []
