"""Skew-symmetric graphs, integer symmetric flows and odd barriers.

A bidirected graph ``H`` maps to a skew-symmetric graph on nodes ``(v, 0)``
and ``(v, 1)``: being at ``(v, 0)`` means the walk entered ``v`` and must
next leave it, ``(v, 1)`` the opposite.  Edge ``i`` of ``H`` becomes the mate
arcs ``2i`` and ``2i + 1``.

Augmenting (regular) paths are found with Edmonds' blossom search on a
transit graph: every residual mate pair contributes one matched copy, or two
if its residual capacity is at least 2.  An alternating path from the root
through such copies is exactly a regular path, so the blossom search answers
both "is there an augmenting path" and "which nodes are regular-reachable".
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bdgraph import IN, OUT, BDEdge, BDFlow, BDGraph, flow_errors, flow_value


class SkFlowError(RuntimeError):
    pass


@dataclass(frozen=True)
class SkGraph:
    nodes: tuple
    tail: tuple
    head: tuple
    cap: tuple
    source: tuple
    sink: tuple

    @staticmethod
    def sigma(x):
        return (x[0], 1 - x[1])

    @staticmethod
    def mate(k: int) -> int:
        return k ^ 1

    @property
    def n_arcs(self) -> int:
        return len(self.tail)

    def errors(self) -> list:
        errs = []
        for k in range(self.n_arcs):
            m = k ^ 1
            if self.tail[m] != self.sigma(self.head[k]) or self.head[m] != self.sigma(self.tail[k]):
                errs.append(f"arc {k} and its mate are not skew")
            if self.cap[k] != self.cap[m]:
                errs.append(f"arc {k} capacity differs from its mate")
        return errs


def _state(v, mark_leaving: bool) -> tuple:
    return (v, 0 if mark_leaving else 1)


def bd_to_sk(H: BDGraph):
    """Skew-symmetric image of ``H``; returns ``(G, tau)``.

    ``tau`` maps SK nodes to BD nodes and SK arcs to BD edge indices.
    """
    nodes = []
    for v in H.nodes:
        nodes += [(v, 0), (v, 1)]
    tail, head, cap = [], [], []
    for e in H.edges:
        # Traverse from u to v, then the mate from v to u.
        tail.append(_state(e.u, e.mu == OUT))
        head.append(_state(e.v, e.mv == IN))
        tail.append(_state(e.v, e.mv == OUT))
        head.append(_state(e.u, e.mu == IN))
        cap += [e.cap, e.cap]
    G = SkGraph(tuple(nodes), tuple(tail), tuple(head), tuple(cap),
                (H.source, 0), (H.source, 1))
    tau = {"node": {x: x[0] for x in nodes}, "arc": {k: k // 2 for k in range(len(tail))}}
    return G, tau


def sk_to_bd(G: SkGraph, V1: Iterable | None = None, source=None) -> BDGraph:
    """Bidirected graph of ``G`` w.r.t. a node bipartition ``(V1, sigma(V1))``.

    By default ``V1`` holds every ``(v, 0)``, which inverts :func:`bd_to_sk`
    (roles are replaced by arc pair numbers).
    """
    V1 = set(V1) if V1 is not None else {x for x in G.nodes if x[1] == 0}
    for x in G.nodes:
        if (x in V1) == (G.sigma(x) in V1):
            raise SkFlowError("V1 must contain exactly one node of each mate pair")
    names = []
    for x in G.nodes:
        if x[0] not in names:
            names.append(x[0])
    edges = []
    for k in range(0, G.n_arcs, 2):
        x, y = G.tail[k], G.head[k]
        mx = OUT if x in V1 else IN
        my = IN if y in V1 else OUT
        edges.append(BDEdge(x[0], y[0], mx, my, G.cap[k], ("pair", k // 2)))
    return BDGraph(tuple(names), tuple(edges), source if source is not None else G.source[0], "sk")


def flip(H: BDGraph, X: Iterable) -> BDGraph:
    """Reverse every edge-end mark at nodes of ``X``."""
    X = set(X)
    if H.source in X:
        raise SkFlowError("cannot flip the source")
    edges = []
    for e in H.edges:
        mu = -e.mu if e.u in X else e.mu
        mv = -e.mv if e.v in X else e.mv
        edges.append(BDEdge(e.u, e.v, mu, mv, e.cap, e.role))
    return BDGraph(H.nodes, tuple(edges), H.source, H.kind, H.inf, H.gs)


@dataclass
class SkFlow:
    graph: SkGraph
    f: list

    @property
    def value(self) -> int:
        s = self.graph.source
        out = sum(x for k, x in enumerate(self.f) if self.graph.tail[k] == s)
        inn = sum(x for k, x in enumerate(self.f) if self.graph.head[k] == s)
        return out - inn

    def errors(self) -> list:
        G = self.graph
        errs = []
        for k, x in enumerate(self.f):
            if x != self.f[k ^ 1]:
                errs.append(f"asymmetric on arc {k}")
            if not 0 <= x <= G.cap[k]:
                errs.append(f"capacity violated on arc {k}")
        bal = {x: 0 for x in G.nodes}
        for k, x in enumerate(self.f):
            bal[G.tail[k]] += x
            bal[G.head[k]] -= x
        for v, b in bal.items():
            if v not in (G.source, G.sink) and b:
                errs.append(f"conservation violated at {v}")
        return errs


def residual(G: SkGraph, f: Sequence) -> list:
    """Residual arcs ``(k, d, tail, head, c_f)``; ``d = +1`` forward, ``-1`` reverse.

    The mate of residual arc ``(k, d)`` is ``(k ^ 1, d)``.
    """
    out = []
    for k in range(G.n_arcs):
        if f[k] < 0 or f[k] > G.cap[k]:
            raise SkFlowError(f"infeasible flow on arc {k}")
        if f[k] < G.cap[k]:
            out.append((k, 1, G.tail[k], G.head[k], G.cap[k] - f[k]))
        if f[k] > 0:
            out.append((k, -1, G.head[k], G.tail[k], f[k]))
    return out


# -- transit graph and blossom search ----------------------------------------

ROOT, TARGET = 0, 1


class _Transit:
    """Matching instance whose alternating root paths are regular paths."""

    def __init__(self, G: SkGraph, f: Sequence, with_target: bool, rng: random.Random | None):
        self.G = G
        self.arc_of = [None, None]  # end vertex -> residual arc (k, d)
        self.depart = [None, None]  # end vertex -> SK node the arc leaves
        match = [-1, -1]
        for k in range(0, G.n_arcs, 2):
            for d in (1, -1):
                r = G.cap[k] - f[k] if d == 1 else f[k]
                for _ in range(min(r, 2)):
                    a = len(self.arc_of)
                    for kk in (k, k + 1):
                        self.arc_of.append((kk, d))
                        self.depart.append(G.tail[kk] if d == 1 else G.head[kk])
                    match += [a + 1, a]
        n = len(self.arc_of)
        self.n = n
        self.match = match
        by_depart: dict = {}
        for v in range(2, n):
            by_depart.setdefault(self.depart[v], []).append(v)
        adj = [[] for _ in range(n)]
        s = G.source
        for v in by_depart.get(s, []):
            adj[ROOT].append(v)
            adj[v].append(ROOT)
            if with_target:
                adj[TARGET].append(v)
                adj[v].append(TARGET)
        for v in range(2, n):
            for w in by_depart.get(G.sigma(self.depart[v]), []):
                if w != match[v]:
                    adj[v].append(w)
        if rng is not None:
            for lst in adj:
                rng.shuffle(lst)
        self.adj = adj

    def search(self):
        """Edmonds search from ROOT; returns ``(target or -1, parent, even set)``."""
        n, match, adj = self.n, self.match, self.adj
        base = list(range(n))
        p = [-1] * n
        used = [False] * n
        used[ROOT] = True
        q = deque([ROOT])

        def lca(a, b):
            seen = [False] * n
            while True:
                a = base[a]
                seen[a] = True
                if match[a] == -1:
                    break
                a = p[match[a]]
            while True:
                b = base[b]
                if seen[b]:
                    return b
                b = p[match[b]]

        def mark_path(v, b, child, blossom):
            while base[v] != b:
                blossom[base[v]] = blossom[base[match[v]]] = True
                p[v] = child
                child = match[v]
                v = p[match[v]]

        while q:
            v = q.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == ROOT or (match[to] != -1 and p[match[to]] != -1):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        return to, p, used
                    used[match[to]] = True
                    q.append(match[to])
        return -1, p, used

    def arcs_of_path(self, target: int, p: list) -> list:
        """Residual arcs along the alternating path ROOT -> ... -> target."""
        seq = []
        v = target
        while p[v] != ROOT:
            exit_end = p[v]
            enter_end = self.match[exit_end]
            seq.append(self.arc_of[enter_end])
            v = enter_end
        seq.reverse()
        return seq


def _shortcut(path: list) -> list:
    """Drop cycles between repeated arcs until every arc occurs once."""
    while True:
        first = {}
        for i, a in enumerate(path):
            if a in first:
                path = path[: first[a]] + path[i:]
                break
            first[a] = i
        else:
            return path


def _arc_ends(G: SkGraph, a) -> tuple:
    k, d = a
    return (G.tail[k], G.head[k]) if d == 1 else (G.head[k], G.tail[k])


def is_regular_path(G: SkGraph, f: Sequence, path: Sequence, start=None, end=None) -> bool:
    """Check that ``path`` (residual arcs) is a c_f-regular walk from ``start`` to ``end``."""
    start = G.source if start is None else start
    end = G.sink if end is None else end
    cur = start
    counts: dict = {}
    for a in path:
        k, d = a
        r = G.cap[k] - f[k] if d == 1 else f[k]
        if r < 1:
            return False
        t, h = _arc_ends(G, a)
        if t != cur:
            return False
        cur = h
        counts[a] = counts.get(a, 0) + 1
    if cur != end:
        return False
    for (k, d), m in counts.items():
        if m > 1:
            return False
        if (k ^ 1, d) in counts:
            r = G.cap[k] - f[k] if d == 1 else f[k]
            if r < 2:
                return False
    return True


def find_regular_path(G: SkGraph, f: Sequence, rng: random.Random | None = None):
    """A c_f-regular source-sink path as a list of residual arcs ``(k, d)``, or None."""
    tr = _Transit(G, f, True, rng)
    target, p, _ = tr.search()
    if target == -1:
        return None
    path = _shortcut(tr.arcs_of_path(target, p))
    if not is_regular_path(G, f, path):
        raise SkFlowError("blossom search produced an irregular path")
    return path


def regular_reachable(G: SkGraph, f: Sequence, rng: random.Random | None = None) -> frozenset:
    """SK nodes reachable from the source by c_f-regular paths."""
    tr = _Transit(G, f, False, rng)
    target, _, used = tr.search()
    assert target == -1
    R = {G.source}
    for v in range(2, tr.n):
        if used[v]:
            R.add(G.sigma(tr.depart[v]))
    return frozenset(R)


def augment(f: list, path: Sequence) -> None:
    """Push one unit along ``path`` and one along its mirror image."""
    for k, d in path:
        f[k] += d
        f[k ^ 1] += d


def max_isk_flow(G: SkGraph, rng: random.Random | None = None, f: Sequence | None = None) -> SkFlow:
    """Maximum integer symmetric flow by regular-path augmentation."""
    f = list(f) if f is not None else [0] * G.n_arcs
    while True:
        path = find_regular_path(G, f, rng)
        if path is None:
            return SkFlow(G, f)
        augment(f, path)


# -- odd barriers ---------------------------------------------------------------


@dataclass(frozen=True)
class OddBarrier:
    flip_set: frozenset
    A: frozenset
    M: frozenset
    B: tuple  # tuple of frozensets, sorted canonically
    capacity: int

    def key(self) -> tuple:
        """Order-free representation for equality checks."""
        return (
            tuple(sorted(map(repr, self.flip_set))),
            tuple(sorted(map(repr, self.A))),
            tuple(sorted(map(repr, self.M))),
            tuple(sorted(tuple(sorted(map(repr, b))) for b in self.B)),
            self.capacity,
        )


def _touch(H: BDGraph, X: frozenset, Y: frozenset) -> int:
    """c[X, Y] ignoring directions."""
    return sum(e.cap for e in H.edges if (e.u in X and e.v in Y) or (e.v in X and e.u in Y))


def _cut_sums(H: BDGraph, A: frozenset, other: frozenset | None, w: Sequence) -> tuple:
    """Sums of ``w`` over edges between A and ``other`` leaving / entering A.

    With ``other`` None, sums over edges inside A that leave both ends /
    enter both ends (loops included).
    """
    leave = enter = 0
    for i, e in enumerate(H.edges):
        x = w[i]
        if other is None:
            if e.u in A and e.v in A:
                if e.mu == OUT and e.mv == OUT:
                    leave += x
                elif e.mu == IN and e.mv == IN:
                    enter += x
            continue
        if e.u in A and e.v in other:
            m = e.mu
        elif e.v in A and e.u in other:
            m = e.mv
        else:
            continue
        if m == OUT:
            leave += x
        else:
            enter += x
    return leave, enter


def barrier_capacity(H: BDGraph, A: frozenset, k: int) -> int:
    """``2 c[->A, <-A] + c[->A] - k`` in ``H`` (already flipped)."""
    caps = [e.cap for e in H.edges]
    inside, _ = _cut_sums(H, A, None, caps)
    out, _ = _cut_sums(H, A, frozenset(H.nodes) - A, caps)
    return 2 * inside + out - k


def _weak_components(H: BDGraph, S: frozenset) -> list:
    parent = {v: v for v in S}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in H.edges:
        if e.cap > 0 and e.u in S and e.v in S:
            a, b = find(e.u), find(e.v)
            if a != b:
                parent[a] = b
    comps: dict = {}
    for v in H.nodes:
        if v in S:
            comps.setdefault(find(v), set()).add(v)
    return [frozenset(c) for c in comps.values()]


def _canon_B(comps: Iterable, H: BDGraph) -> tuple:
    order = {v: i for i, v in enumerate(H.nodes)}
    return tuple(sorted(comps, key=lambda b: min(order[v] for v in b)))


def extract_barrier_sk(G: SkGraph, f: Sequence, H: BDGraph, rng=None) -> OddBarrier:
    """Barrier of a maximum flow from its regular-reachable set."""
    if find_regular_path(G, f, rng) is not None:
        raise SkFlowError("flow is not maximum: a regular path exists")
    R = regular_reachable(G, f, rng)
    fwd = frozenset(x[0] for x in R if x[1] == 0)
    bwd = frozenset(x[0] for x in R if x[1] == 1)
    A = (fwd - bwd) | (bwd - fwd)
    M = frozenset(H.nodes) - (fwd | bwd)
    flip_set = bwd - fwd
    Hf = flip(H, flip_set)
    B = _canon_B(_weak_components(Hf, fwd & bwd), H)
    cap = barrier_capacity(Hf, A, len(B))
    return OddBarrier(frozenset(flip_set), frozenset(A), M, B, cap)


def extract_barrier(H: BDGraph, g: Sequence, rng=None) -> OddBarrier:
    """Canonical odd barrier for a maximum IBD-flow ``g`` on ``H``."""
    G, _ = bd_to_sk(H)
    f = []
    for x in g:
        f += [x, x]
    B = extract_barrier_sk(G, f, H, rng)
    val = flow_value(H, g)
    if B.capacity != val:
        raise SkFlowError(f"barrier capacity {B.capacity} != flow value {val}")
    return B


@dataclass
class BarrierReport:
    violations: list = field(default_factory=list)
    capacity: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_barrier(H: BDGraph, g: Sequence, B: OddBarrier) -> BarrierReport:
    """Structural, capacity and optimality checks of ``B`` against flow ``g``."""
    rep = BarrierReport()
    bad = rep.violations
    V = frozenset(H.nodes)
    parts = [B.A, B.M, *B.B]
    if sum(len(p) for p in parts) != len(V) or frozenset().union(*parts) != V:
        bad.append("sets do not partition the nodes")
    if H.source not in B.A:
        bad.append("source not in A")
    if not B.flip_set <= B.A:
        bad.append("flip set not inside A")
    if H.source in B.flip_set:
        bad.append("source flipped")
        return rep
    Hf = flip(H, B.flip_set)
    caps = [e.cap for e in Hf.edges]
    for i, Bi in enumerate(B.B):
        lc, _ = _cut_sums(Hf, B.A, Bi, caps)
        if lc % 2 == 0:
            bad.append(f"c[->A, B{i}] = {lc} is even")
        if _touch(Hf, Bi, B.M):
            bad.append(f"B{i} touches M")
        for j in range(i + 1, len(B.B)):
            if _touch(Hf, Bi, B.B[j]):
                bad.append(f"B{i} touches B{j}")
    cap = barrier_capacity(Hf, B.A, len(B.B))
    rep.capacity = cap
    if cap != B.capacity:
        bad.append(f"stored capacity {B.capacity} != recomputed {cap}")
    errs = flow_errors(H, g)
    if errs:
        bad.append("flow infeasible: " + errs[0])
        return rep
    val = flow_value(H, g)
    if val != cap:
        bad.append(f"flow value {val} != barrier capacity {cap}")
    gi, ge = _cut_sums(Hf, B.A, None, g)
    ci, _ = _cut_sums(Hf, B.A, None, caps)
    if gi != ci or ge != 0:
        bad.append("condition (i) fails inside A")
    gl, gE = _cut_sums(Hf, B.A, B.M, g)
    cl, _ = _cut_sums(Hf, B.A, B.M, caps)
    if gl != cl or gE != 0:
        bad.append("condition (ii) fails between A and M")
    for i, Bi in enumerate(B.B):
        gl, gE = _cut_sums(Hf, B.A, Bi, g)
        cl, _ = _cut_sums(Hf, B.A, Bi, caps)
        if not ((gl == cl - 1 and gE == 0) or (gl == cl and gE == 1)):
            bad.append(f"condition (iii) fails at B{i}")
    return rep


def max_ibd_flow(H: BDGraph, rng: random.Random | None = None):
    """Maximum integer bidirected flow on ``H`` together with its canonical barrier."""
    G, _ = bd_to_sk(H)
    sk = max_isk_flow(G, rng)
    g = [sk.f[2 * i] for i in range(len(H.edges))]
    if any(sk.f[2 * i + 1] != g[i] for i in range(len(H.edges))):
        raise SkFlowError("asymmetric flow")
    flow = BDFlow(H, g)
    if flow.value != sk.value:
        raise SkFlowError("value changed in transfer")
    B = extract_barrier_sk(G, sk.f, H, rng)
    if B.capacity != flow.value:
        raise SkFlowError(f"barrier capacity {B.capacity} != flow value {flow.value}")
    return flow, B
