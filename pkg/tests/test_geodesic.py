from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncflow.dual import solve_dual
from ncflow.generate import random_instance
from ncflow.geodesic import (
    DualInfeasible,
    ZeroFlowCase,
    bar_lengths,
    edge_lengths,
    geodesic_structure,
    is_geodesic,
    path_length,
)
from ncflow.model import Instance, path_edges
from ncflow.oracle import enumerate_t_paths


def test_bar_lengths():
    inst = Instance(("s", "u", "v", "t"), (("s", "u"), ("u", "v"), ("v", "t"), ("s", "t")), {"s", "t"},
                    {x: 1 for x in "suvt"}, {x: 1 for x in "suvt"})
    w = {"s": 1, "u": 2, "v": 4, "t": 1}
    bar = bar_lengths(w, inst)
    assert bar[("u", "v")] == 3
    assert bar[("s", "u")] == 2  # 1 + 2/2
    assert bar_lengths({x: 1 for x in "suvt"}, inst)[("s", "u")] == Fraction(3, 2)
    assert bar[("s", "t")] == 2


def test_star_structure(star):
    gs = geodesic_structure(star, {"s": 0, "t": 0, "u": 0, "v": 7}, 10)
    assert gs.p == 10
    assert gs.ell[("s", "v")] == 5
    assert gs.pi["v"] == 5 and gs.central == {"v"}
    assert gs.zones == {"s": {"s"}, "t": {"t"}, "u": {"u"}}
    assert gs.carrier_edges == set(star.edges)
    assert all(gs.edge_kind(e) == "gate" for e in star.edges)
    assert is_geodesic(("s", "v", "t"), gs)


def test_zero_flow_case(star):
    res = geodesic_structure(star, {v: 0 for v in star.nodes}, 2)
    assert isinstance(res, ZeroFlowCase) and res.p == 3


def test_infeasible_dual_rejected(star):
    with pytest.raises(DualInfeasible):
        geodesic_structure(star, {v: 0 for v in star.nodes}, 4)


def test_three_zone_zones(three_zone):
    gs = geodesic_structure(three_zone, {v: 0 for v in three_zone.nodes}, 20)
    assert gs.zones == {"p": {"p", "a", "b"}, "s": {"s", "c", "d"}, "r": {"r", "e", "f", "g"}}
    assert gs.central == {"w"}
    assert gs.edge_kind(("c", "e")) == "cross"
    assert gs.edge_kind(("b", "w")) == "gate"
    assert gs.edge_kind(("r", "f")) == "zone"


def test_three_zone_geodesic_shapes(three_zone):
    gs = geodesic_structure(three_zone, {v: 0 for v in three_zone.nodes}, 20)
    assert is_geodesic(("s", "c", "e", "r"), gs)
    assert is_geodesic(("p", "a", "b", "w", "d", "s"), gs)
    assert not is_geodesic(("p", "a", "b", "w"), gs)


def test_longer_path_is_not_geodesic():
    # s-t directly (length 2) and a detour s-x-t (length 3).
    inst = Instance(("s", "x", "t"), (("s", "t"), ("s", "x"), ("x", "t")), {"s", "t"},
                    {v: 1 for v in "sxt"}, {v: 1 for v in "sxt"})
    gs = geodesic_structure(inst, {v: 0 for v in inst.nodes}, 2)
    assert is_geodesic(("s", "t"), gs)
    assert not is_geodesic(("s", "x", "t"), gs)


def _structure(seed, n, lam):
    inst = random_instance(seed, n)
    l = solve_dual(inst, lam).l
    return inst, l, geodesic_structure(inst, l, lam)


@given(st.integers(0, 10**6), st.integers(2, 8), st.integers(1, 25))
def test_edge_length_sum_matches_node_sum(seed, n, lam):
    inst, l, _ = _structure(seed, n, lam)
    ell = edge_lengths(inst, l)
    for P in enumerate_t_paths(inst):
        assert path_length(P, ell, inst) == sum(inst.cost[v] + l[v] for v in P)


@given(st.integers(0, 10**6), st.integers(2, 8), st.integers(1, 25))
def test_shape_iff_length(seed, n, lam):
    inst, l, gs = _structure(seed, n, lam)
    if isinstance(gs, ZeroFlowCase):
        return
    for P in enumerate_t_paths(inst):
        # is_geodesic raises if the shape test and the length test disagree.
        if is_geodesic(P, gs):
            assert all(v in gs.carrier_nodes for v in P)
            assert all(inst.edge(u, v) in gs.carrier_edges for u, v in path_edges(P))


@given(st.integers(0, 10**6), st.integers(2, 8), st.integers(1, 25))
def test_zone_partition(seed, n, lam):
    inst, l, gs = _structure(seed, n, lam)
    if isinstance(gs, ZeroFlowCase):
        return
    parts = list(gs.zones.values()) + [gs.central]
    assert sum(len(x) for x in parts) == len(gs.carrier_nodes)
    assert frozenset().union(*parts) == gs.carrier_nodes
    for s in inst.terminals:
        assert gs.pi[s] == 0
    for e in gs.carrier_edges:
        u, v = e
        if gs.edge_kind(e) == "zone":
            assert gs.pi[u] != gs.pi[v]
