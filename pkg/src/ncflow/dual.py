"""Compact dual program: node lengths l plus per-terminal distance labels phi."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .geodesic import bar_lengths, alpha, edge_lengths, terminal_distances
from .lp import GE, LE, MIN, LpProblem, solve_lp
from .model import Instance


class DualSolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class DualSolution:
    l: dict
    phi: dict  # (terminal, node) -> value
    objective: Fraction


@dataclass
class CompactDual:
    lp: LpProblem
    l_var: dict
    phi_var: dict


def build_compact_dual(inst: Instance, lam) -> CompactDual:
    """min c.l subject to |phi_s(u) - phi_s(v)| <= abar(e) + lbar(e) and phi_s(t) - phi_s(s) >= lam."""
    lp = LpProblem()
    l_var = {v: lp.add_var(("l", v)) for v in inst.nodes}
    phi_var = {
        (s, v): lp.add_var(("phi", s, v), lower=None)
        for s in inst.sorted_terminals
        for v in inst.nodes
    }
    abar = bar_lengths(inst.cost, inst)
    for u, v in inst.edges:
        au, av = alpha(u, inst), alpha(v, inst)
        for s in inst.sorted_terminals:
            for x, y in ((u, v), (v, u)):
                row = {phi_var[s, x]: 1, phi_var[s, y]: -1}
                row[l_var[u]] = row.get(l_var[u], 0) - au
                row[l_var[v]] = row.get(l_var[v], 0) - av
                lp.add_row(row, LE, abar[(u, v)])
    for s in inst.sorted_terminals:
        for t in inst.sorted_terminals:
            if s != t:
                lp.add_row({phi_var[s, t]: 1, phi_var[s, s]: -1}, GE, lam)
    lp.set_objective({l_var[v]: inst.cap[v] for v in inst.nodes}, MIN)
    return CompactDual(lp, l_var, phi_var)


def solve_dual(inst: Instance, lam) -> DualSolution:
    cd = build_compact_dual(inst, lam)
    res = solve_lp(cd.lp)
    if not res.optimal:
        raise DualSolveError(f"compact dual is {res.status}")
    l = {v: res.x[j] for v, j in cd.l_var.items()}
    phi = {k: res.x[j] for k, j in cd.phi_var.items()}
    return DualSolution(l, phi, res.value)


def check_dual_feasible(inst: Instance, l: Mapping, lam) -> bool:
    """True iff every pair of distinct terminals is at ell-distance >= lam."""
    if any(Fraction(x) < 0 for x in l.values()):
        return False
    dist = terminal_distances(inst, edge_lengths(inst, l))
    for s in inst.sorted_terminals:
        for t in inst.sorted_terminals:
            if s != t and t in dist[s] and dist[s][t] < lam:
                return False
    return True
