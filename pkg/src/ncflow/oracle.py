"""Brute-force references used to check the solver on small inputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .bdgraph import BDGraph
from .geodesic import edge_lengths, path_length
from .lp import EQ, LE, MAX, MIN, LpProblem, solve_lp
from .model import Instance, Multiflow, load_function, path_cost

DEFAULT_NODE_BOUND = 12


class OracleBoundError(ValueError):
    pass


def enumerate_t_paths(inst: Instance, bound: int = DEFAULT_NODE_BOUND) -> list:
    """All node-simple T-paths, one orientation each (first end has the lower index)."""
    if len(inst.nodes) > bound:
        raise OracleBoundError(f"{len(inst.nodes)} nodes exceed bound {bound}")
    idx = inst.index
    out = []

    def extend(path, seen):
        v = path[-1]
        for w in inst.adj[v]:
            if w in seen:
                continue
            if w in inst.terminals:
                if idx[w] > idx[path[0]]:
                    out.append(tuple(path) + (w,))
                continue
            seen.add(w)
            path.append(w)
            extend(path, seen)
            path.pop()
            seen.discard(w)

    for s in inst.sorted_terminals:
        extend([s], {s})
    return out


def enumerate_edge_simple_t_paths(inst: Instance, bound: int = 7) -> list:
    """T-paths that may repeat inner nodes but no edge (reversal-deduplicated)."""
    if len(inst.nodes) > bound:
        raise OracleBoundError(f"{len(inst.nodes)} nodes exceed bound {bound}")
    idx = inst.index
    out = []

    def extend(path, used):
        v = path[-1]
        for w in inst.adj[v]:
            e = inst.edge(v, w)
            if e in used:
                continue
            if w in inst.terminals:
                if w != path[0] and idx[w] > idx[path[0]]:
                    out.append(tuple(path) + (w,))
                continue
            used.add(e)
            path.append(w)
            extend(path, used)
            path.pop()
            used.discard(e)

    for s in inst.sorted_terminals:
        extend([s], set())
    return out


def _path_lp(inst: Instance, lam, paths: Sequence, per_visit: bool) -> tuple:
    lp = LpProblem()
    xs = [lp.add_var(("F", p)) for p in paths]
    for v in inst.nodes:
        row = {}
        for j, p in zip(xs, paths):
            k = p.count(v) if per_visit else int(v in p)
            if k:
                row[j] = k
        if row:
            lp.add_row(row, LE, inst.cap[v])
    lp.set_objective({j: Fraction(lam) - path_cost(p, inst.cost) for j, p in zip(xs, paths)}, MAX)
    res = solve_lp(lp)
    F = Multiflow(tuple((p, res.x[j]) for j, p in zip(xs, paths) if res.x[j] != 0))
    return res.value, F


def brute_force_primal(inst: Instance, lam, bound: int = DEFAULT_NODE_BOUND) -> tuple:
    """Optimum of the path LP for ``lam * val(F) - a(F)`` and a basic optimal F."""
    return _path_lp(inst, lam, enumerate_t_paths(inst, bound), per_visit=False)


def brute_force_primal_edge_simple(inst: Instance, lam, bound: int = 7) -> tuple:
    """Same LP over edge-simple T-paths; repeated visits count toward node load."""
    return _path_lp(inst, lam, enumerate_edge_simple_t_paths(inst, bound), per_visit=True)


def brute_force_ncp(inst: Instance, bound: int = DEFAULT_NODE_BOUND) -> tuple:
    """(max value, min cost at max value) by two path LPs."""
    paths = enumerate_t_paths(inst, bound)
    if not paths:
        return Fraction(0), Fraction(0)
    lp = LpProblem()
    xs = [lp.add_var() for _ in paths]
    caps = []
    for v in inst.nodes:
        row = {j: 1 for j, p in zip(xs, paths) if v in p}
        if row:
            caps.append((row, inst.cap[v]))
            lp.add_row(row, LE, inst.cap[v])
    lp.set_objective({j: 1 for j in xs}, MAX)
    best = solve_lp(lp).value
    lp2 = LpProblem()
    xs2 = [lp2.add_var() for _ in paths]
    for row, c in caps:
        lp2.add_row(row, LE, c)
    lp2.add_row({j: 1 for j in xs2}, EQ, best)
    lp2.set_objective({j: path_cost(p, inst.cost) for j, p in zip(xs2, paths)}, MIN)
    return best, solve_lp(lp2).value


def two_terminal_flow(inst: Instance) -> tuple:
    """(max value, min cost) of s-t flow in the node-split digraph; needs |T| = 2.

    Arc-flow formulation independent of path enumeration: each node v becomes
    v_in -> v_out with capacity c(v) and cost a(v); each edge gives two
    uncapacitated arcs.  Arcs into s_in and out of t_out are omitted.
    """
    if len(inst.terminals) != 2:
        raise ValueError("two-terminal instances only")
    s, t = inst.sorted_terminals
    arcs = []  # (tail, head, cap or None, cost)
    for v in inst.nodes:
        arcs.append(((v, "in"), (v, "out"), inst.cap[v], inst.cost[v]))
    for u, v in inst.edges:
        for x, y in ((u, v), (v, u)):
            if x == t or y == s:
                continue
            arcs.append(((x, "out"), (y, "in"), None, 0))
    src, snk = (s, "in"), (t, "out")

    def build():
        lp = LpProblem()
        xs = [lp.add_var() for _ in arcs]
        bal: dict = {}
        for j, (a, b, c, _) in enumerate(arcs):
            if c is not None:
                lp.add_row({j: 1}, LE, c)
            bal.setdefault(a, {})[j] = 1
            bal.setdefault(b, {})[j] = -1
        for node, row in bal.items():
            if node not in (src, snk):
                lp.add_row(row, EQ, 0)
        return lp, xs, bal.get(src, {})

    lp, xs, out_s = build()
    lp.set_objective(out_s, MAX)
    best = solve_lp(lp).value
    lp2, xs2, out_s2 = build()
    lp2.add_row(out_s2, EQ, best)
    lp2.set_objective({j: arcs[j][3] for j in xs2}, MIN)
    return best, solve_lp(lp2).value


@dataclass
class CsReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_complementary_slackness(F: Multiflow, l: Mapping, inst: Instance, lam) -> CsReport:
    """Support paths must have a + l length exactly lam; l-positive nodes must be saturated."""
    rep = CsReport()
    ell = edge_lengths(inst, l)
    lam = Fraction(lam)
    for p, w in F:
        if w == 0:
            continue
        if path_length(p, ell, inst) != lam:
            rep.violations.append(f"path {'-'.join(map(str, p))} has length {path_length(p, ell, inst)} != {lam}")
    load = load_function(F, inst).node
    for v in inst.nodes:
        if Fraction(l.get(v, 0)) > 0 and load[v] != inst.cap[v]:
            rep.violations.append(f"node {v} has l > 0 but load {load[v]} < {inst.cap[v]}")
    return rep


# -- bidirected oracles -----------------------------------------------------------


def brute_force_max_ibd(H: BDGraph, max_edges: int = 40) -> int:
    """Maximum IBD-flow value by exhaustive search over integer edge values.

    Conservation is propagated: once a non-source node has a single
    unassigned incident edge, that edge's value is forced.
    """
    E = len(H.edges)
    if E > max_edges:
        raise OracleBoundError(f"{E} edges exceed bound {max_edges}")
    inc = {v: [] for v in H.nodes}
    for i, e in enumerate(H.edges):
        inc[e.u].append((i, e.mu))
        inc[e.v].append((i, e.mv))
    f = [None] * E
    best = [None]
    src = H.source

    def node_state(v):
        part = 0
        free = set()
        for i, m in inc[v]:
            if f[i] is None:
                free.add(i)
            else:
                part += m * f[i]
        return part, free

    def propagate(trail):
        changed = True
        while changed:
            changed = False
            for v in H.nodes:
                if v == src:
                    continue
                part, free = node_state(v)
                if not free:
                    if part != 0:
                        return False
                    continue
                if len(free) == 1:
                    (i,) = free
                    coef = sum(m for j, m in inc[v] if j == i)
                    if part % coef:
                        return False
                    x = -part // coef
                    if x < 0 or x > H.edges[i].cap:
                        return False
                    f[i] = x
                    trail.append(i)
                    changed = True
        return True

    def rec():
        trail = []
        if propagate(trail):
            free = [i for i in range(E) if f[i] is None]
            if not free:
                val = node_state(src)[0]
                if best[0] is None or val > best[0]:
                    best[0] = val
            else:
                # Branch on an edge at the node with the fewest unassigned edges.
                pick = None
                for v in H.nodes:
                    if v == src:
                        continue
                    _, fr = node_state(v)
                    if fr and (pick is None or len(fr) < len(pick)):
                        pick = fr
                i = min(pick) if pick else free[0]
                for x in range(H.edges[i].cap + 1):
                    f[i] = x
                    rec()
                    f[i] = None
        for i in trail:
            f[i] = None

    rec()
    return best[0] if best[0] is not None else 0


def brute_force_regular_reachable(G, f: Sequence, max_steps: int = 200000) -> frozenset:
    """Nodes reachable by c_f-regular arc-simple paths, by exhaustive DFS."""
    from .skflow import residual

    res = residual(G, f)
    by_tail: dict = {}
    rcap = {}
    for k, d, t, h, r in res:
        by_tail.setdefault(t, []).append((k, d, h))
        rcap[(k, d)] = r
    reach = {G.source}
    steps = [0]
    used = set()

    def dfs(x):
        steps[0] += 1
        if steps[0] > max_steps:
            raise OracleBoundError("regular path search budget exceeded")
        for k, d, h in by_tail.get(x, []):
            a = (k, d)
            if a in used:
                continue
            mate = (k ^ 1, d)
            if mate in used and rcap[a] < 2:
                continue
            used.add(a)
            reach.add(h)
            dfs(h)
            used.discard(a)

    dfs(G.source)
    return frozenset(reach)
