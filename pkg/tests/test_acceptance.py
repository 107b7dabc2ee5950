"""Acceptance suite: one test per criterion, each reporting a single pass/fail line.

Run ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction

import pytest

from ncflow.bdgraph import build_compact_H, flow_errors, is_good
from ncflow.decompose import decompose_good_flow, decompose_paths, generated_flow
from ncflow.dual import check_dual_feasible, solve_dual
from ncflow.generate import random_bd_graph, random_instance
from ncflow.geodesic import ZeroFlowCase, edge_lengths, geodesic_structure, is_geodesic, min_terminal_distance, terminal_distances
from ncflow.model import Instance, is_feasible, lambda_for_ncp, load_function, objective_phi, path_cost
from ncflow.oracle import (
    brute_force_max_ibd,
    brute_force_primal,
    check_complementary_slackness,
    enumerate_t_paths,
    two_terminal_flow,
)
from ncflow.pipeline import extract_loads, loads_to_flow, solve_ncp, solve_ncp_lambda
from ncflow.skflow import max_ibd_flow, verify_barrier

SUITE_SIZE = 400
BD_GRAPHS = 200
CANON_GRAPHS = 50
TWO_TERMINAL = 60
ZERO_CASES = 60

RESULTS: dict = {}


def report(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    RESULTS[name] = line
    print(line)
    assert ok, line


def half_integral(x) -> bool:
    return (2 * Fraction(x)).denominator == 1


class Run:
    """One pipeline run on a suite instance, plus its oracle value."""

    def __init__(self, seed: int):
        rng = random.Random(seed)
        self.inst = random_instance(seed, 2 + seed % 7)
        self.lam = lambda_for_ncp(self.inst) if seed % 10 == 0 else rng.randint(0, 20)
        self.error = None
        try:
            self.sol = solve_ncp_lambda(self.inst, self.lam)
        except Exception as e:  # recorded as a failure of every criterion
            self.sol, self.error = None, f"seed {seed}: {type(e).__name__}: {e}"
        self.opt, _ = brute_force_primal(self.inst, self.lam)
        self.seed = seed


@pytest.fixture(scope="module")
def suite():
    t0 = time.perf_counter()
    runs = [Run(seed) for seed in range(SUITE_SIZE)]
    return runs, time.perf_counter() - t0


def _first(fails):
    return f"; first failure: {fails[0]}" if fails else ""


def test_c1_half_integer_primal(suite):
    runs, secs = suite
    fails = []
    for r in runs:
        if r.error:
            fails.append(r.error)
            continue
        F = r.sol.F
        if not all(half_integral(w) for _, w in F):
            fails.append(f"seed {r.seed}: weight not half-integral")
        elif not is_feasible(F, r.inst):
            fails.append(f"seed {r.seed}: infeasible")
        elif objective_phi(F, r.inst, r.lam) != r.opt:
            fails.append(f"seed {r.seed}: phi {objective_phi(F, r.inst, r.lam)} != {r.opt}")
    nonint = sum(1 for r in runs if r.sol and any(w.denominator == 2 for _, w in r.sol.F))
    report("C1 half-integer primal", not fails and secs < 300,
           f"{len(runs) - len(fails)}/{len(runs)} instances match the path LP optimum, "
           f"{nonint} with half-integer weights, {secs:.1f}s" + _first(fails))


def test_c2_duality_certificate(suite):
    runs, _ = suite
    fails = []
    for r in runs:
        if r.error:
            fails.append(r.error)
            continue
        c = r.sol.cert
        if not (c.phi == c.dual_objective == c.rounded_objective):
            fails.append(f"seed {r.seed}: phi {c.phi}, c.l {c.dual_objective}, c.l_hat {c.rounded_objective}")
            continue
        for name, l in (("l", r.sol.dual.l), ("l_hat", c.l_hat)):
            cs = check_complementary_slackness(r.sol.F, l, r.inst, r.lam)
            if not cs.ok:
                fails.append(f"seed {r.seed}: slackness with {name}: {cs.violations[0]}")
    report("C2 duality certificate", not fails,
           f"phi = c.l = c.l_hat and slackness hold on {len(runs) - len(fails)}/{len(runs)}" + _first(fails))


def test_c3_half_integer_dual(suite):
    runs, _ = suite
    fails = []
    n_paths = n_geo = 0
    for r in runs:
        if r.error:
            fails.append(r.error)
            continue
        inst, lam, l, lh = r.inst, r.lam, r.sol.dual.l, r.sol.cert.l_hat
        if not all(x >= 0 and half_integral(x) for x in lh.values()):
            fails.append(f"seed {r.seed}: l_hat not in the nonnegative half-integers")
            continue
        if any(l[v] == 0 and lh[v] != 0 for v in inst.nodes):
            fails.append(f"seed {r.seed}: l_hat positive where l vanishes")
            continue
        for P in enumerate_t_paths(inst):
            n_paths += 1
            a = path_cost(P, inst.cost)
            long_hat = a + sum(lh[v] for v in P)
            if long_hat < lam:
                fails.append(f"seed {r.seed}: path {P} has a + l_hat = {long_hat} < {lam}")
                break
            if a + sum(l[v] for v in P) == lam:
                n_geo += 1
                if long_hat != lam:
                    fails.append(f"seed {r.seed}: tight path {P} has a + l_hat = {long_hat}")
                    break
    report("C3 half-integer dual", not fails,
           f"{n_paths} T-paths checked, {n_geo} tight under l stay tight under l_hat" + _first(fails))


def test_c4_max_flow_min_barrier():
    fails = []
    rng = random.Random(2024)
    total = 0
    for i in range(BD_GRAPHS):
        H = random_bd_graph(rng)
        g, B = max_ibd_flow(H, random.Random(i))
        brute = brute_force_max_ibd(H)
        rep = verify_barrier(H, g.f, B)
        cap = rep.capacity
        total += g.value
        if not (g.value == cap == B.capacity == brute):
            fails.append(f"graph {i}: flow {g.value}, barrier {cap}, brute force {brute}")
        elif not rep.ok:
            fails.append(f"graph {i}: {rep.violations[0]}")
    report("C4 max flow equals min barrier", not fails,
           f"{BD_GRAPHS - len(fails)}/{BD_GRAPHS} graphs agree with exhaustive search "
           f"(total value {total})" + _first(fails))


def test_c5_barrier_canonicity():
    fails = []
    rng = random.Random(77)
    for i in range(CANON_GRAPHS):
        H = random_bd_graph(rng)
        keys = {max_ibd_flow(H, random.Random(1000 * i + k))[1].key() for k in range(3)}
        if len(keys) != 1:
            fails.append(f"graph {i}: {len(keys)} distinct barriers")
    report("C5 barrier canonicity", not fails,
           f"{CANON_GRAPHS - len(fails)}/{CANON_GRAPHS} graphs give one barrier over three orders" + _first(fails))


def test_c6_saturation(suite):
    runs, _ = suite
    fails = []
    n = 0
    for r in runs:
        if r.error:
            fails.append(r.error)
            continue
        sat = r.sol.cert.saturation
        if sat is None:
            continue
        n += 1
        H = sat.flow.graph
        c_e0 = sum(H.edges[i].cap for i in sat.locked)
        if not (sat.locked and sat.value == sat.target == 2 * c_e0):
            fails.append(f"seed {r.seed}: value {sat.value}, 2c(E0) = {2 * c_e0}")
        elif flow_errors(H, sat.flow.f) or not is_good(sat.flow.f, H):
            fails.append(f"seed {r.seed}: saturating flow infeasible or not good")
        elif any(sat.flow.f[i] != H.edges[i].cap for i in sat.locked):
            fails.append(f"seed {r.seed}: a locked edge is not saturated")
    report("C6 saturation", not fails and n > 0,
           f"{n - len(fails)}/{n} runs with locked edges saturate them" + _first(fails))


def test_c7_decomposition(suite):
    runs, _ = suite
    fails = []
    n = 0
    for r in runs:
        if r.error or r.sol.cert.zero_case:
            continue
        dbl = r.inst.doubled()
        gs = geodesic_structure(dbl, r.sol.dual.l, r.lam)
        loads = extract_loads(dbl, r.lam)
        H = build_compact_H(gs, dbl.cap)
        f = loads_to_flow(loads, H, gs).f
        n += 1
        paths = decompose_paths(f, H)
        F = decompose_good_flow(f, H, gs)
        got = load_function(F, dbl)
        if generated_flow(paths, H) != f:
            fails.append(f"seed {r.seed}: H-paths do not regenerate the flow")
        elif len(paths) > len(H.edges):
            fails.append(f"seed {r.seed}: {len(paths)} paths for {len(H.edges)} edges")
        elif any(got.node[v] != loads.node.get(v, 0) for v in dbl.nodes) or any(
            got.edge[e] != loads.edge.get(e, 0) for e in dbl.edges
        ):
            fails.append(f"seed {r.seed}: loads differ")
        elif not all(is_geodesic(P, gs) for P, _ in F):
            fails.append(f"seed {r.seed}: non-geodesic path")
        elif not all(Fraction(w).denominator == 1 for _, w in list(F) + paths):
            fails.append(f"seed {r.seed}: fractional weight from integral flow")
    report("C7 decomposition", not fails and n > 0,
           f"{n - len(fails)}/{n} load-generated flows decompose exactly" + _first(fails))


def _two_terminal(seed: int) -> Instance:
    inst = random_instance(seed, 2 + seed % 7)
    T = inst.sorted_terminals[:2]
    return Instance(inst.nodes, inst.edges, T, inst.cap, inst.cost)


def test_c8_two_terminal():
    fails = []
    for seed in range(TWO_TERMINAL):
        inst = _two_terminal(seed)
        c = solve_ncp(inst).cert
        want = two_terminal_flow(inst)
        if (c.value, c.cost) != tuple(want):
            fails.append(f"seed {seed}: value/cost {(c.value, c.cost)} != {tuple(want)}")
    report("C8 two-terminal specialization", not fails,
           f"{TWO_TERMINAL - len(fails)}/{TWO_TERMINAL} match min-cost max-flow" + _first(fails))


def test_c9_zero_flow_case():
    fails = []
    for seed in range(ZERO_CASES):
        inst = random_instance(seed, 2 + seed % 7)
        zero = {v: 0 for v in inst.nodes}
        p = min_terminal_distance(inst, terminal_distances(inst, edge_lengths(inst, zero)))
        lam = random.Random(seed).randint(0, math.ceil(p) - 1)
        if not isinstance(geodesic_structure(inst, solve_dual(inst, lam).l, lam), ZeroFlowCase):
            fails.append(f"seed {seed}: p = {p} > {lam} but no zero case")
            continue
        sol = solve_ncp_lambda(inst, lam)
        c = sol.cert
        if not (c.zero_case and len(sol.F) == 0 and c.phi == 0):
            fails.append(f"seed {seed}: nonzero flow at lambda {lam} < p = {p}")
        elif not (check_dual_feasible(inst, sol.dual.l, lam) and check_dual_feasible(inst, c.l_hat, lam)):
            fails.append(f"seed {seed}: dual infeasible")
    report("C9 zero-flow case", not fails,
           f"{ZERO_CASES - len(fails)}/{ZERO_CASES} instances with lambda < p return F = 0" + _first(fails))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
