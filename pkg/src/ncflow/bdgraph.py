"""Bidirected auxiliary graphs built from a geodesic structure.

Each edge stores a direction mark per end: ``OUT`` (the edge leaves that end)
or ``IN`` (it enters).  A loop has both ends at one node with equal marks.

Node labels are tuples:

* ``("q",)`` source, ``("z",)`` source of the lower-bound-free graph
* ``("v1", v)``, ``("v2", v)`` copies of a noncentral carrier node
* ``("hub", w)`` (compact) or ``("hub", w, i)`` (expensive) gadget hubs
* ``("port", w, s)`` gadget ports

Edge roles mirror them: ``("node", v)``, ``("zone", u, v)``, ``("cross", u, v)``,
``("gate", v, w)``, ``("hub", w[, i])``, ``("leg", w[, i], s)``, ``("source", s)``,
and in the lower-bound-free graph ``("qloop",)``, ``("split_in", v)``,
``("split_out", v)``, ``("root", w, i)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .geodesic import GeodesicStructure

log = logging.getLogger(__name__)

OUT, IN = 1, -1

Q = ("q",)
Z = ("z",)


class BDGraphError(ValueError):
    pass


@dataclass(frozen=True)
class BDEdge:
    u: tuple
    v: tuple
    mu: int
    mv: int
    cap: int
    role: tuple

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def mark_at(self, x) -> int:
        if x == self.u:
            return self.mu
        if x == self.v:
            return self.mv
        raise KeyError(x)

    def other(self, x):
        return self.v if x == self.u else self.u


def arc(u, v, cap, role) -> BDEdge:
    return BDEdge(u, v, OUT, IN, cap, role)


@dataclass(frozen=True)
class BDGraph:
    nodes: tuple
    edges: tuple
    source: tuple = Q
    kind: str = "compact"
    inf: int = 0
    gs: GeodesicStructure | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for e in self.edges:
            if e.is_loop and e.mu != e.mv:
                raise BDGraphError(f"loop {e.role} enters and leaves its node")

    @cached_property
    def role_index(self) -> dict:
        return {e.role: i for i, e in enumerate(self.edges)}

    def idx(self, role) -> int:
        return self.role_index[role]

    @cached_property
    def incident(self) -> dict:
        """node -> list of (edge index, mark); loops appear twice."""
        out = {v: [] for v in self.nodes}
        for i, e in enumerate(self.edges):
            out[e.u].append((i, e.mu))
            out[e.v].append((i, e.mv))
        return out

    @cached_property
    def hubs(self) -> list:
        """(hub node, loop index, {terminal: leg index}) per gadget or 1-gadget."""
        out = []
        for i, e in enumerate(self.edges):
            if e.role[0] == "hub":
                legs = {}
                for j, f in enumerate(self.edges):
                    if f.role[0] == "leg" and f.role[1:-1] == e.role[1:]:
                        legs[f.role[-1]] = j
                out.append((e.u, i, legs))
        return out

    def total_cap(self) -> int:
        return sum(e.cap for e in self.edges)


def infinite_capacity(c: Mapping) -> int:
    return 2 * sum(c.values()) + 2


def _carrier_parts(gs: GeodesicStructure):
    inst = gs.inst
    zone_arcs, cross, gates = [], [], []
    for e in sorted(gs.carrier_edges, key=lambda e: (inst.index[e[0]], inst.index[e[1]])):
        u, v = e
        kind = gs.edge_kind(e)
        if kind == "zone":
            if gs.pi[u] == gs.pi[v]:
                raise BDGraphError(f"equal potentials on zone edge {u}-{v}")
            if gs.pi[u] > gs.pi[v]:
                u, v = v, u
            zone_arcs.append((u, v))
        elif kind == "cross":
            cross.append((u, v))
        else:
            if u in gs.central:
                u, v = v, u
            gates.append((u, v))
    return zone_arcs, cross, gates


def _build(gs: GeodesicStructure, c: Mapping, expensive: bool) -> BDGraph:
    for v, x in c.items():
        if x % 2:
            raise BDGraphError(f"odd capacity {x} at {v}; double capacities first")
    inst = gs.inst
    inf = infinite_capacity(c)
    T = inst.sorted_terminals
    order = [v for v in inst.nodes if v in gs.carrier_nodes]
    nodes = [Q]
    edges = []
    for v in order:
        if v in gs.central:
            continue
        nodes += [("v1", v), ("v2", v)]
        edges.append(arc(("v1", v), ("v2", v), c[v], ("node", v)))
    for w in order:
        if w not in gs.central:
            continue
        ports = [("port", w, s) for s in T]
        if expensive:
            hubs = [("hub", w, i) for i in range(1, c[w] + 1)]
            nodes += hubs + ports
            for h in hubs:
                edges.append(BDEdge(h, h, OUT, OUT, 1, h))
                for s in T:
                    edges.append(arc(("port", w, s), h, 1, ("leg",) + h[1:] + (s,)))
        else:
            h = ("hub", w)
            nodes += [h] + ports
            edges.append(BDEdge(h, h, OUT, OUT, c[w], h))
            for s in T:
                edges.append(arc(("port", w, s), h, c[w], ("leg", w, s)))
    zone_arcs, cross, gates = _carrier_parts(gs)
    for u, v in zone_arcs:
        edges.append(arc(("v2", u), ("v1", v), inf, ("zone", u, v)))
    for u, v in cross:
        edges.append(BDEdge(("v2", u), ("v2", v), OUT, OUT, inf, ("cross", u, v)))
    for v, w in gates:
        s = gs.zone_of[v]
        edges.append(arc(("v2", v), ("port", w, s), inf, ("gate", v, w)))
    for s in T:
        edges.append(arc(Q, ("v1", s), inf, ("source", s)))
    kind = "expensive" if expensive else "compact"
    return BDGraph(tuple(nodes), tuple(edges), Q, kind, inf, gs)


def build_compact_H(gs: GeodesicStructure, c: Mapping) -> BDGraph:
    """Compact bidirected graph: one gadget with capacity c(w) per central node."""
    return _build(gs, c, expensive=False)


def build_expensive_H(gs: GeodesicStructure, c: Mapping) -> BDGraph:
    """Expensive form: c(w) unit-capacity 1-gadgets per central node, sharing ports."""
    return _build(gs, c, expensive=True)


def locked_edges(H: BDGraph, l: Mapping) -> frozenset:
    """Indices of node arcs and hub loops whose originating node has l > 0."""
    out = set()
    hub_locked = arc_locked = False
    for i, e in enumerate(H.edges):
        r = e.role
        if r[0] == "node" and l.get(r[1], 0) > 0:
            out.add(i)
            arc_locked = True
        elif r[0] == "hub" and l.get(r[1], 0) > 0:
            out.add(i)
            hub_locked = True
    if hub_locked and arc_locked:
        log.info("locked hub loops together with locked node arcs")
    return frozenset(out)


def eliminate_lower_bounds(H: BDGraph, E0: Iterable[int]) -> BDGraph:
    """Reroute locked edges through a new source ``z``.

    A locked node arc v1->v2 becomes a both-leaving edge {v1, z} and an arc
    z->v2, each with capacity c(v); a locked unit hub loop becomes a
    both-leaving root edge {z, hub} of capacity 2.  The old source gets an
    entering loop of infinite capacity.
    """
    E0 = set(E0)
    inf = H.inf or infinite_capacity({0: H.total_cap()})
    edges = []
    for i, e in enumerate(H.edges):
        if i not in E0:
            edges.append(e)
            continue
        r = e.role
        if r[0] == "node":
            v = r[1]
            edges.append(BDEdge(e.u, Z, OUT, OUT, e.cap, ("split_in", v)))
            edges.append(arc(Z, e.v, e.cap, ("split_out", v)))
        elif r[0] == "hub" and len(r) == 3:
            if e.cap != 1:
                raise BDGraphError("root edges need unit hub loops")
            edges.append(BDEdge(Z, e.u, OUT, OUT, 2, ("root",) + r[1:]))
        else:
            raise BDGraphError(f"locked edge of unknown role {r}")
    edges.append(BDEdge(H.source, H.source, IN, IN, inf, ("qloop",)))
    return BDGraph(H.nodes + (Z,), tuple(edges), Z, "h1", inf, H.gs)


def divergence(H: BDGraph, f: Sequence) -> dict:
    div = {v: 0 for v in H.nodes}
    for i, e in enumerate(H.edges):
        x = f[i]
        if x:
            div[e.u] += e.mu * x
            div[e.v] += e.mv * x
    return div


def flow_value(H: BDGraph, f: Sequence):
    return divergence(H, f)[H.source]


def flow_errors(H: BDGraph, f: Sequence) -> list:
    """Conservation and capacity violations of ``f`` on ``H``."""
    errs = []
    if len(f) != len(H.edges):
        return ["flow length mismatch"]
    for i, e in enumerate(H.edges):
        if f[i] < 0 or f[i] > e.cap:
            errs.append(f"edge {e.role}: {f[i]} outside [0, {e.cap}]")
    for v, d in divergence(H, f).items():
        if v != H.source and d != 0:
            errs.append(f"divergence {d} at {v}")
    return errs


@dataclass
class BDFlow:
    graph: BDGraph
    f: list

    @property
    def value(self):
        return flow_value(self.graph, self.f)

    def errors(self) -> list:
        return flow_errors(self.graph, self.f)


def is_good(f: Sequence, H: BDGraph) -> bool:
    """Every hub: legs sum to twice the loop, and no leg exceeds the loop."""
    for _, loop, legs in H.hubs:
        fl = f[loop]
        if sum(f[j] for j in legs.values()) != 2 * fl:
            return False
        if any(f[j] > fl for j in legs.values()):
            return False
    return True


def path_image(path: Sequence, H: BDGraph) -> tuple:
    """Map a closed q-q path (sequence of edge indices) to its T-path in G.

    Raises :class:`BDGraphError` unless the path is a valid bidirected walk
    that starts and ends with source arcs and whose image is a geodesic.
    """
    if not path:
        raise BDGraphError("empty path")
    first, last = H.edges[path[0]], H.edges[path[-1]]
    if first.role[0] != "source" or last.role[0] != "source":
        raise BDGraphError("path must start and end with source arcs")
    _check_walk(path, H, H.source, H.source)
    out = []
    for i in path:
        r = H.edges[i].role
        if r[0] in ("node", "hub"):
            out.append(r[1])
        elif r[0] not in ("source", "zone", "cross", "gate", "leg"):
            raise BDGraphError(f"unexpected edge {r} in q-q path")
    out = tuple(out)
    if H.gs is not None:
        from .geodesic import is_geodesic

        if len(out) < 2 or not is_geodesic(out, H.gs):
            raise BDGraphError(f"image {out} is not a geodesic")
    return out


def _check_walk(path: Sequence, H: BDGraph, start, end) -> None:
    """Raise unless ``path`` is a bidirected walk from ``start`` leaving it to ``end``."""
    cur = start
    need = OUT
    for k, i in enumerate(path):
        e = H.edges[i]
        if e.is_loop:
            if e.u != cur or e.mu != need:
                raise BDGraphError(f"step {k}: loop {e.role} not usable at {cur}")
            need = -e.mu
            continue
        if cur == e.u:
            m_here, nxt, m_there = e.mu, e.v, e.mv
        elif cur == e.v:
            m_here, nxt, m_there = e.mv, e.u, e.mu
        else:
            raise BDGraphError(f"step {k}: edge {e.role} not at {cur}")
        if m_here != need:
            raise BDGraphError(f"step {k}: no transit pair at {cur}")
        cur = nxt
        need = -m_there
    if cur != end:
        raise BDGraphError("walk does not return to its end")


def path_lift(path: Sequence, H: BDGraph) -> list:
    """Edge-index sequence of the closed q-q path in compact H for geodesic ``path``."""
    gs = H.gs
    if H.kind != "compact":
        raise BDGraphError("lift is defined on the compact graph")
    inst = gs.inst
    s, t = path[0], path[-1]
    out = [H.idx(("source", s))]
    n = len(path)
    k = 0
    while k < n:
        v = path[k]
        if v in gs.central:
            u, x = path[k - 1], path[k + 1]
            out += [
                H.idx(("gate", u, v)),
                H.idx(("leg", v, gs.zone_of[u])),
                H.idx(("hub", v)),
                H.idx(("leg", v, gs.zone_of[x])),
                H.idx(("gate", x, v)),
            ]
            k += 1
            continue
        out.append(H.idx(("node", v)))
        if k + 1 < n:
            x = path[k + 1]
            if x in gs.central:
                pass
            elif gs.zone_of[v] == gs.zone_of[x]:
                if gs.pi[v] < gs.pi[x]:
                    out.append(H.idx(("zone", v, x)))
                else:
                    out.append(H.idx(("zone", x, v)))
            else:
                e = inst.edge(v, x)
                out.append(H.idx(("cross",) + e))
        k += 1
    out.append(H.idx(("source", t)))
    _check_walk(out, H, H.source, H.source)
    return out


def label(x) -> str:
    return ":".join(str(p) for p in x)


def dump_text(H: BDGraph) -> str:
    """Plain-text edge list: ``<u> <mark_u> <v> <mark_v> cap=<c> role=<role>``."""
    lines = [f"# kind={H.kind} source={label(H.source)}"]
    for e in H.edges:
        mu = "out" if e.mu == OUT else "in"
        mv = "out" if e.mv == OUT else "in"
        lines.append(f"{label(e.u)} {mu} {label(e.v)} {mv} cap={e.cap} role={label(e.role)}")
    return "\n".join(lines) + "\n"
