"""Round a fractional optimal dual to a half-integer one.

The rounding works on an auxiliary graph whose nodes are the terminals and
the nodes lying on geodesics.  Regular edges are edges of G between such
nodes; virtual edges summarize detours through the rest of G and carry the
cheapest detour cost.  A two-variable-per-constraint system over labels
rho^-_s(v), rho^+_s(v) is solved exactly by the doubling transform, and the
rounded length is rho^+ - rho^- - a.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .geodesic import edge_lengths, terminal_distances
from .model import Instance, is_half_integral

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "==", ">="


class RoundingError(RuntimeError):
    """The label system is infeasible or its solution is inconsistent."""


@dataclass
class RoundingGraph:
    inst: Instance
    lam: Fraction
    nodes: tuple  # V-Gamma, in instance order
    regular: frozenset  # canonical edge keys
    virtual: dict  # canonical pair -> mu
    T: dict  # node -> frozenset of terminals
    Pi: dict  # node -> frozenset of frozenset pairs
    forward: frozenset  # (s, u, v): some geodesic from s steps u -> v
    blocked: frozenset  # l > 0 outside V-Gamma (possible only where c = 0)
    dist: dict = field(repr=False, default_factory=dict)

    def mu(self, e) -> int:
        return 0 if e in self.regular else self.virtual[e]

    @property
    def edges(self) -> list:
        return sorted(self.regular | set(self.virtual), key=self._key)

    def _key(self, e):
        idx = self.inst.index
        return (idx[e[0]], idx[e[1]])


def _pair(inst: Instance, u, v) -> tuple:
    return (u, v) if inst.index[u] < inst.index[v] else (v, u)


def build_gamma(inst: Instance, l: Mapping, lam) -> RoundingGraph:
    """Auxiliary graph for rounding an optimal dual ``l``."""
    lam = Fraction(lam)
    ell = edge_lengths(inst, l)
    dist = terminal_distances(inst, ell)
    terms = inst.sorted_terminals
    T: dict = {}
    Pi: dict = {}
    for i, s in enumerate(terms):
        for t in terms[i + 1:]:
            if t not in dist[s] or dist[s][t] != lam:
                continue
            for v in inst.nodes:
                if v in dist[s] and v in dist[t] and dist[s][v] + dist[t][v] == lam:
                    T.setdefault(v, set()).update((s, t))
                    Pi.setdefault(v, set()).add(frozenset((s, t)))
    for s in terms:
        T.setdefault(s, {s})
    nodes = tuple(v for v in inst.nodes if v in T)
    in_gamma = set(nodes)
    blocked = frozenset(v for v in inst.nodes if v not in in_gamma and l.get(v, 0) != 0)
    for v in blocked:
        if inst.cap[v] != 0:
            raise RoundingError(f"node {v} is on no geodesic but has l = {l[v]} and c > 0")
        log.info("node %s off geodesics with l > 0 and zero capacity; blocking it", v)

    regular = frozenset(e for e in inst.edges if e[0] in in_gamma and e[1] in in_gamma)
    forward = set()
    for u, v in regular:
        for x, y in ((u, v), (v, u)):
            for s in T[x] & T[y]:
                if x not in dist[s]:
                    continue
                for t in terms:
                    if t != s and y in dist[t] and dist[s][x] + ell[(u, v)] + dist[t][y] == lam:
                        forward.add((s, x, y))
                        break

    outside = [v for v in inst.nodes if v not in in_gamma and v not in blocked]
    out_set = set(outside)
    virtual: dict = {}
    for u in nodes:
        d = _node_weighted_dijkstra(inst, [x for x in inst.adj[u] if x in out_set], out_set)
        if not d:
            continue
        for v in nodes:
            if v == u or inst.index[v] < inst.index[u]:
                continue
            e = _pair(inst, u, v)
            if e in regular:
                continue
            cands = [d[y] for y in inst.adj[v] if y in d]
            if cands:
                virtual[e] = min(cands)
    return RoundingGraph(
        inst, lam, nodes, regular, virtual,
        {v: frozenset(ts) for v, ts in T.items()},
        {v: frozenset(ps) for v, ps in Pi.items()},
        frozenset(forward), blocked, dist,
    )


def _node_weighted_dijkstra(inst: Instance, starts, allowed) -> dict:
    """Cheapest a-weight of a path inside ``allowed`` from any start to each node."""
    idx = inst.index
    dist = {}
    heap = [(inst.cost[x], idx[x], x) for x in starts]
    heapq.heapify(heap)
    while heap:
        d, _, x = heapq.heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        for y in inst.adj[x]:
            if y in allowed and y not in dist:
                heapq.heappush(heap, (d + inst.cost[y], idx[y], y))
    return dist


# -- the label system ---------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    coefs: tuple  # ((var, +1/-1), ...), at most two entries
    rel: str
    rhs: Fraction
    family: str


@dataclass
class TwoVarSystem:
    variables: list
    constraints: list

    def families(self) -> set:
        return {c.family for c in self.constraints}

    def satisfied_by(self, x: Mapping) -> list:
        """Constraints violated by assignment ``x``."""
        bad = []
        for c in self.constraints:
            lhs = sum(k * Fraction(x[v]) for v, k in c.coefs)
            ok = lhs <= c.rhs if c.rel == LE else lhs >= c.rhs if c.rel == GE else lhs == c.rhs
            if not ok:
                bad.append(c)
        return bad


def build_rho_system(gamma: RoundingGraph, l: Mapping) -> TwoVarSystem:
    inst, lam = gamma.inst, gamma.lam
    T = gamma.T
    var = []
    for v in gamma.nodes:
        for s in sorted(T[v], key=inst.index.__getitem__):
            var += [("-", s, v), ("+", s, v)]
    cons = []

    def add(coefs, rel, rhs, fam):
        cons.append(Constraint(tuple(coefs), rel, Fraction(rhs), fam))

    for s in inst.sorted_terminals:
        add([(("-", s, s), 1)], EQ, 0, "i")
    for v in gamma.nodes:
        for s in T[v]:
            add([(("+", s, v), 1), (("-", s, v), -1)], EQ if l.get(v, 0) == 0 else GE, inst.cost[v], "ii")
        for pair in gamma.Pi.get(v, ()):
            s, t = sorted(pair, key=inst.index.__getitem__)
            add([(("+", s, v), 1), (("-", t, v), 1)], EQ, lam, "iii")
            add([(("+", t, v), 1), (("-", s, v), 1)], EQ, lam, "iii")
    for e in gamma.edges:
        u, v = e
        mu = gamma.mu(e)
        for s in T[u] & T[v]:
            for x, y in ((u, v), (v, u)):
                rel = EQ if (s, x, y) in gamma.forward else LE
                add([(("-", s, y), 1), (("+", s, x), -1)], rel, mu, "iv")
        for s in T[u]:
            for t in T[v]:
                if s != t:
                    add([(("+", s, u), 1), (("+", t, v), 1)], GE, lam - mu, "v")
    return TwoVarSystem(var, cons)


def solve_two_var_system(system: TwoVarSystem) -> dict:
    """Half-integer solution of a system with at most two +-1 terms per constraint.

    Each variable x gets a pair (x+, x-) standing for (x, -x); every
    constraint becomes difference constraints on the pairs, solved by
    Bellman-Ford.  Raises RoundingError when a negative cycle shows
    infeasibility.
    """
    pos = {v: 2 * i for i, v in enumerate(system.variables)}
    n = 2 * len(pos)
    arcs = []  # (from, to, w): d[to] <= d[from] + w

    def y(v, sign):
        return pos[v] if sign > 0 else pos[v] + 1

    def le(coefs, b):
        if len(coefs) == 1:
            (v, k), = coefs
            arcs.append((y(v, -k), y(v, k), 2 * b))
            return
        (v1, k1), (v2, k2) = coefs
        if v1 == v2:
            raise RoundingError(f"constraint repeats variable {v1}")
        # k1*x1 + k2*x2 <= b becomes y(k1 x1) - y(-k2 x2) <= b and y(k2 x2) - y(-k1 x1) <= b
        arcs.append((y(v2, -k2), y(v1, k1), b))
        arcs.append((y(v1, -k1), y(v2, k2), b))

    for c in system.constraints:
        neg = tuple((v, -k) for v, k in c.coefs)
        if c.rel in (LE, EQ):
            le(c.coefs, c.rhs)
        if c.rel in (GE, EQ):
            le(neg, -c.rhs)
    d = [Fraction(0)] * n
    for _ in range(n + 1):
        changed = False
        for a, b, w in arcs:
            if d[a] + w < d[b]:
                d[b] = d[a] + w
                changed = True
        if not changed:
            break
    else:
        raise RoundingError("label system is infeasible (negative cycle)")
    x = {v: (d[i] - d[i + 1]) / 2 for v, i in pos.items()}
    bad = system.satisfied_by(x)
    if bad:
        raise RoundingError(f"doubling solution violates {bad[0]}")
    return x


def round_dual(inst: Instance, l: Mapping, lam) -> dict:
    """Half-integer optimal dual from an optimal dual ``l``."""
    gamma = build_gamma(inst, l, lam)
    system = build_rho_system(gamma, l)
    rho = solve_two_var_system(system)
    l_hat = {v: Fraction(0) for v in inst.nodes}
    for v in gamma.blocked:
        l_hat[v] = Fraction(lam)
    for v in gamma.nodes:
        vals = {rho[("+", s, v)] - rho[("-", s, v)] - inst.cost[v] for s in gamma.T[v]}
        if len(vals) != 1:
            raise RoundingError(f"rounded length at {v} depends on the terminal: {sorted(vals)}")
        (x,) = vals
        if x < 0 or not is_half_integral(x):
            raise RoundingError(f"rounded length {x} at {v}")
        l_hat[v] = x
    return l_hat


def witness_labels(gamma: RoundingGraph, l: Mapping, through_terminals: bool = False) -> dict:
    """Shortest-path labels: rho^- = min pre-length, rho^+ = min full length of s-v paths.

    Lengths are node weights a + l plus mu on edges.  By default paths may
    not pass through a terminal other than their ends.
    """
    inst = gamma.inst
    w = {v: inst.cost[v] + Fraction(l.get(v, 0)) for v in gamma.nodes}
    adj = {v: [] for v in gamma.nodes}
    for e in gamma.edges:
        u, v = e
        mu = gamma.mu(e)
        adj[u].append((v, mu))
        adj[v].append((u, mu))
    idx = inst.index
    out = {}
    for s in inst.sorted_terminals:
        pre = {s: Fraction(0)}
        heap = [(Fraction(0), idx[s], s)]
        done = set()
        while heap:
            d, _, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            if u != s and u in inst.terminals and not through_terminals:
                continue
            for v, mu in adj[u]:
                nd = d + w[u] + mu
                if v not in pre or nd < pre[v]:
                    pre[v] = nd
                    heapq.heappush(heap, (nd, idx[v], v))
        for v in gamma.nodes:
            if s in gamma.T[v] and v in pre:
                out[("-", s, v)] = pre[v]
                out[("+", s, v)] = pre[v] + w[v]
    return out
