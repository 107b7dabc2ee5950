"""Edge lengths from node weights, terminal distances, zones and the carrier subgraph."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .model import Instance, path_edges

HALF = Fraction(1, 2)


class DualInfeasible(ValueError):
    """Some pair of terminals is closer than lambda."""


def alpha(v, inst: Instance) -> Fraction:
    return Fraction(1) if v in inst.terminals else HALF


def bar_lengths(w: Mapping, inst: Instance) -> dict:
    """Spread node weights onto edges: terminals give their whole weight, inner nodes half."""
    return {
        (u, v): alpha(u, inst) * Fraction(w.get(u, 0)) + alpha(v, inst) * Fraction(w.get(v, 0))
        for u, v in inst.edges
    }


def edge_lengths(inst: Instance, l: Mapping) -> dict:
    """ell = bar(a) + bar(l)."""
    abar = bar_lengths(inst.cost, inst)
    lbar = bar_lengths(l, inst)
    return {e: abar[e] + lbar[e] for e in inst.edges}


def dijkstra(inst: Instance, length: Mapping, source) -> dict:
    """Exact single-source distances over nonnegative edge lengths.

    Unreachable nodes are absent from the result.  Heap ties are broken by
    node index.
    """
    idx = inst.index
    dist = {source: Fraction(0)}
    done = set()
    heap = [(Fraction(0), idx[source], source)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in inst.adj[u]:
            nd = d + length[inst.edge(u, v)]
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, idx[v], v))
    return dist


def terminal_distances(inst: Instance, length: Mapping) -> dict:
    return {s: dijkstra(inst, length, s) for s in inst.sorted_terminals}


def min_terminal_distance(inst: Instance, dist: Mapping):
    """Smallest distance between distinct terminals, or None if no pair is connected."""
    best = None
    for s in inst.sorted_terminals:
        for t in inst.sorted_terminals:
            if s != t and t in dist[s]:
                if best is None or dist[s][t] < best:
                    best = dist[s][t]
    return best


def path_length(path: Sequence, length: Mapping, inst: Instance) -> Fraction:
    return sum((length[inst.edge(u, v)] for u, v in path_edges(path)), Fraction(0))


@dataclass(frozen=True)
class ZeroFlowCase:
    """All terminal pairs are farther apart than lambda; the zero multiflow is optimal."""

    p: Fraction | None
    lam: int


@dataclass(frozen=True)
class GeodesicStructure:
    inst: Instance
    lam: int
    ell: dict
    p: Fraction
    dist: dict  # terminal -> node -> distance
    pi: dict
    zones: dict  # terminal -> frozenset
    zone_of: dict  # node -> terminal, for zone nodes only
    central: frozenset
    carrier_nodes: frozenset
    carrier_edges: frozenset

    def edge_kind(self, e) -> str:
        """'zone', 'cross' or 'gate' for a carrier edge."""
        u, v = e
        if u in self.central or v in self.central:
            return "gate"
        if self.zone_of[u] == self.zone_of[v]:
            return "zone"
        return "cross"


def geodesic_structure(inst: Instance, l: Mapping, lam):
    """Build zones, central nodes and the carrier subgraph for lengths a + l.

    Returns :class:`ZeroFlowCase` when the minimum terminal distance exceeds
    ``lam`` (or no two terminals are connected).
    """
    ell = edge_lengths(inst, l)
    for e, x in ell.items():
        if x <= 0:
            raise ValueError(f"nonpositive length on {e}")
    dist = terminal_distances(inst, ell)
    p = min_terminal_distance(inst, dist)
    lam = Fraction(lam)
    if p is None or p > lam:
        return ZeroFlowCase(p, lam)
    if p < lam:
        raise DualInfeasible(f"terminal distance {p} < lambda {lam}")
    half = p / 2
    pi = {}
    for v in inst.nodes:
        ds = [dist[s][v] for s in inst.sorted_terminals if v in dist[s]]
        if ds:
            pi[v] = min(ds)
    zones = {}
    zone_of = {}
    for s in inst.sorted_terminals:
        z = frozenset(v for v, d in dist[s].items() if d < half)
        zones[s] = z
        for v in z:
            zone_of[v] = s
    central = frozenset(v for v, x in pi.items() if x == half)
    carrier_nodes = frozenset(v for v, x in pi.items() if x <= half)
    carrier_edges = set()
    for e in inst.edges:
        for u, v in (e, e[::-1]):
            if u not in zone_of:
                continue
            s = zone_of[u]
            if (zone_of.get(v) == s or v in central) and abs(pi[u] - pi[v]) == ell[e]:
                carrier_edges.add(e)
            elif v in zone_of and zone_of[v] != s and pi[u] + pi[v] + ell[e] == p:
                carrier_edges.add(e)
    return GeodesicStructure(
        inst, lam, ell, p, dist, pi, zones, zone_of, central, carrier_nodes,
        frozenset(carrier_edges),
    )


def _shape_ok(path: Sequence, gs: GeodesicStructure) -> bool:
    inst = gs.inst
    if len(path) < 2 or len(set(path)) != len(path):
        return False
    s, t = path[0], path[-1]
    if s == t or s not in inst.terminals or t not in inst.terminals:
        return False
    if any(v not in gs.carrier_nodes for v in path):
        return False
    if any(inst.edge(u, v) not in gs.carrier_edges for u, v in path_edges(path)):
        return False
    centrals = [i for i, v in enumerate(path) if v in gs.central]
    if len(centrals) > 1:
        return False
    if centrals:
        j = centrals[0]
        first, second = path[:j], path[j + 1:]
    else:
        cut = [i for i in range(len(path) - 1)
               if gs.zone_of.get(path[i]) != gs.zone_of.get(path[i + 1])]
        if len(cut) != 1:
            return False
        first, second = path[: cut[0] + 1], path[cut[0] + 1:]
    if not first or not second:
        return False
    if any(gs.zone_of.get(v) != s for v in first):
        return False
    if any(gs.zone_of.get(v) != t for v in second):
        return False
    up = [gs.pi[v] for v in first]
    down = [gs.pi[v] for v in second]
    if any(b <= a for a, b in zip(up, up[1:])):
        return False
    if any(b >= a for a, b in zip(down, down[1:])):
        return False
    return True


def is_geodesic(path: Sequence, gs: GeodesicStructure) -> bool:
    """Structural geodesic test, cross-checked against ell(path) == p."""
    by_shape = _shape_ok(path, gs)
    inst = gs.inst
    simple_t_path = (
        len(path) >= 2
        and path[0] != path[-1]
        and path[0] in inst.terminals
        and path[-1] in inst.terminals
        and not any(v in inst.terminals for v in path[1:-1])
        and len(set(path)) == len(path)
        and all(inst.edge(u, v) in inst.edge_set for u, v in path_edges(path))
    )
    by_length = simple_t_path and path_length(path, gs.ell, inst) == gs.p
    if by_shape != by_length:
        raise AssertionError(f"geodesic tests disagree on {path}")
    return by_shape
