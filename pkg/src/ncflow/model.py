"""Instances, multiflows, load functions and objectives.

Every numeric quantity is an ``int`` or a ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

Node = str
Edge = tuple  # canonical (u, v) with index(u) < index(v)


class InstanceError(ValueError):
    """Raised when an instance cannot be used for solving."""


@dataclass(frozen=True)
class Instance:
    """Undirected node-capacitated network with terminals.

    ``edges`` may be given in any orientation; they are stored canonically
    (lower node index first).  ``cap`` and ``cost`` must not be mutated after
    construction.
    """

    nodes: tuple
    edges: tuple
    terminals: frozenset
    cap: Mapping
    cost: Mapping
    lam: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        index = {v: i for i, v in enumerate(self.nodes)}
        canon = []
        for u, v in self.edges:
            if u in index and v in index and index[u] > index[v]:
                u, v = v, u
            canon.append((u, v))
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "cap", dict(self.cap))
        object.__setattr__(self, "cost", dict(self.cost))

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def adj(self) -> dict:
        out = {v: [] for v in self.nodes}
        for u, v in self.edges:
            out[u].append(v)
            out[v].append(u)
        for v in out:
            out[v].sort(key=self.index.__getitem__)
        return out

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def edge(self, u, v) -> tuple:
        """Canonical key of the edge joining ``u`` and ``v``."""
        return (u, v) if self.index[u] < self.index[v] else (v, u)

    def is_terminal(self, v) -> bool:
        return v in self.terminals

    @cached_property
    def sorted_terminals(self) -> tuple:
        return tuple(v for v in self.nodes if v in self.terminals)

    def with_caps(self, cap: Mapping) -> "Instance":
        return Instance(self.nodes, self.edges, self.terminals, cap, self.cost, self.lam)

    def with_costs(self, cost: Mapping) -> "Instance":
        return Instance(self.nodes, self.edges, self.terminals, self.cap, cost, self.lam)

    def doubled(self) -> "Instance":
        return self.with_caps({v: 2 * c for v, c in self.cap.items()})


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate_instance(inst: Instance) -> ValidationReport:
    """Collect every violated instance invariant."""
    rep = ValidationReport()
    if len(set(inst.nodes)) != len(inst.nodes):
        rep.failures.append("duplicate node names")
    nodes = set(inst.nodes)
    seen = set()
    for u, v in inst.edges:
        if u not in nodes or v not in nodes:
            rep.failures.append(f"edge {u}-{v} uses an unknown node")
            continue
        if u == v:
            rep.failures.append(f"self-loop at {u}")
            continue
        key = frozenset((u, v))
        if key in seen:
            rep.failures.append(f"parallel edge {u}-{v}")
        seen.add(key)
    unknown = inst.terminals - nodes
    if unknown:
        rep.failures.append(f"unknown terminals {sorted(unknown)}")
    if len(inst.terminals & nodes) < 2:
        rep.failures.append("need >= 2 terminals")
    for v in inst.nodes:
        c = inst.cap.get(v)
        a = inst.cost.get(v)
        if not _is_int(c) or c < 0:
            rep.failures.append(f"capacity of {v} must be a nonnegative integer")
        if not _is_int(a):
            rep.failures.append(f"cost of {v} must be an integer")
        elif a < 1:
            rep.failures.append(f"cost must be strictly positive (node {v})")
    if inst.lam is not None and (not _is_int(inst.lam) or inst.lam < 0):
        rep.failures.append("lambda must be a nonnegative integer")
    return rep


def require_valid(inst: Instance) -> None:
    rep = validate_instance(inst)
    if not rep.ok:
        raise InstanceError("; ".join(rep.failures))


@dataclass(frozen=True)
class Multiflow:
    """Weighted collection of T-paths; each path is a tuple of node names."""

    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "items", tuple((tuple(p), Fraction(w)) for p, w in self.items)
        )

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def scaled(self, q) -> "Multiflow":
        q = Fraction(q)
        return Multiflow(tuple((p, w * q) for p, w in self.items))

    def support(self) -> "Multiflow":
        return Multiflow(tuple((p, w) for p, w in self.items if w != 0))

    def merged(self) -> "Multiflow":
        """Combine repeated paths (a path and its reverse are the same path)."""
        acc: dict = {}
        order = []
        for p, w in self.items:
            key = min(p, tuple(reversed(p)))
            if key not in acc:
                acc[key] = Fraction(0)
                order.append(key)
            acc[key] += w
        return Multiflow(tuple((k, acc[k]) for k in order if acc[k] != 0))


def path_edges(path: Sequence) -> list:
    return [(path[i], path[i + 1]) for i in range(len(path) - 1)]


def check_t_path(path: Sequence, inst: Instance) -> list:
    """Problems with ``path`` as a T-path of ``inst`` (empty list if none)."""
    errs = []
    if len(path) < 2:
        return ["path has fewer than two nodes"]
    for v in path:
        if v not in inst.index:
            return [f"node {v} not in instance"]
    s, t = path[0], path[-1]
    if s == t or s not in inst.terminals or t not in inst.terminals:
        errs.append("ends must be distinct terminals")
    if any(v in inst.terminals for v in path[1:-1]):
        errs.append("intermediate terminal")
    used = set()
    for u, v in path_edges(path):
        if u == v or inst.edge(u, v) not in inst.edge_set:
            errs.append(f"{u}-{v} is not an edge")
            continue
        key = inst.edge(u, v)
        if key in used:
            errs.append(f"edge {u}-{v} repeated")
        used.add(key)
    return errs


def check_multiflow(F: Multiflow, inst: Instance) -> list:
    errs = []
    for p, w in F:
        if w < 0:
            errs.append(f"negative weight on {p}")
        errs.extend(check_t_path(p, inst))
    return errs


def multiflow_value(F: Multiflow) -> Fraction:
    return sum((w for _, w in F), Fraction(0))


def path_cost(path: Sequence, cost: Mapping) -> int:
    # Node-simple T-paths are the common case; repeated nodes are charged per visit.
    return sum(cost[v] for v in path)


def multiflow_cost(F: Multiflow, inst: Instance) -> Fraction:
    total = Fraction(0)
    for p, w in F:
        for v in p:
            if v not in inst.cost:
                raise InstanceError(f"path node {v} outside instance")
        total += w * path_cost(p, inst.cost)
    return total


@dataclass(frozen=True)
class LoadFunction:
    node: Mapping
    edge: Mapping

    def is_feasible(self, inst: Instance) -> bool:
        return all(self.node.get(v, 0) <= inst.cap[v] for v in inst.nodes)


def load_function(F: Multiflow, inst: Instance | None = None) -> LoadFunction:
    """Node and edge loads of ``F``.

    With ``inst`` given, every node and edge of the instance gets an entry
    and edges are keyed canonically.
    """
    node: dict = {}
    edge: dict = {}
    if inst is not None:
        node = {v: Fraction(0) for v in inst.nodes}
        edge = {e: Fraction(0) for e in inst.edges}
    for p, w in F:
        for v in set(p):
            node[v] = node.get(v, Fraction(0)) + w
        for u, v in path_edges(p):
            key = inst.edge(u, v) if inst is not None else tuple(sorted((u, v)))
            edge[key] = edge.get(key, Fraction(0)) + w
    return LoadFunction(node, edge)


def is_feasible(F: Multiflow, inst: Instance) -> bool:
    return load_function(F, inst).is_feasible(inst)


def objective_phi(F: Multiflow, inst: Instance, lam) -> Fraction:
    """``lam * val(F) - a(F)``."""
    return Fraction(lam) * multiflow_value(F) - multiflow_cost(F, inst)


def lambda_for_ncp(inst: Instance) -> int:
    total_c = sum(inst.cap[v] for v in inst.nodes)
    total_a = sum(inst.cost[v] for v in inst.nodes)
    return 2 * total_c * total_a + 1


def is_half_integral(x) -> bool:
    return (2 * Fraction(x)).denominator == 1


def dual_objective(l: Mapping, inst: Instance) -> Fraction:
    return sum((inst.cap[v] * Fraction(l.get(v, 0)) for v in inst.nodes), Fraction(0))
