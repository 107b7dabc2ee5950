"""End-to-end solver for the parametric and plain problems.

Steps: double capacities, solve the compact dual, read an optimal multiflow's
node and edge loads off two perturbed dual objectives, turn the loads into a
good integer flow on the compact bidirected graph, decompose it into
geodesics, and halve the weights.  A saturating flow on the expensive graph
and a rounded half-integer dual are produced as extra certificates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

from .bdgraph import (
    BDFlow,
    BDGraph,
    build_compact_H,
    build_expensive_H,
    eliminate_lower_bounds,
    flow_errors,
    is_good,
    locked_edges,
)
from .decompose import decompose_good_flow
from .dual import DualSolution, check_dual_feasible, solve_dual
from .geodesic import GeodesicStructure, ZeroFlowCase, geodesic_structure, is_geodesic
from .model import (
    Instance,
    LoadFunction,
    Multiflow,
    dual_objective,
    is_feasible,
    is_half_integral,
    lambda_for_ncp,
    load_function,
    multiflow_cost,
    multiflow_value,
    objective_phi,
    require_valid,
)
from .oracle import CsReport, check_complementary_slackness
from .rounding import round_dual
from .skflow import OddBarrier, max_ibd_flow

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """An internal consistency check failed."""


# -- load extraction --------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationScheme:
    U: int
    order: tuple
    eps: dict

    @property
    def n(self) -> int:
        return len(self.order)

    def scale(self) -> int:
        return self.U ** (self.n + 1)

    def scaled_costs(self, cost: Mapping) -> dict:
        """Integer costs ``U^(n+1) * (a + eps)``."""
        S = self.scale()
        return {v: S * cost[v] + self.U ** (self.n - i) for i, v in enumerate(self.order, 1)}

    def digits(self, value: int) -> list:
        """Base-U digits of ``value`` as a list of length n, most significant first."""
        out = []
        for _ in range(self.n):
            value, d = divmod(value, self.U)
            out.append(d)
        if value:
            raise PipelineError("perturbation remainder has too many digits")
        return out[::-1]


def perturbation_scheme(order, cap: Mapping) -> PerturbationScheme:
    order = tuple(order)
    U = max((cap[v] for v in order), default=0) + 2
    eps = {v: Fraction(1, U ** (i + 1)) for i, v in enumerate(order, 1)}
    return PerturbationScheme(U, order, eps)


def split_instance(inst: Instance) -> tuple:
    """Subdivide every edge by a zero-cost node of capacity min(c(u), c(v)).

    Returns the new instance and a map from split node to original edge.
    """
    nodes = list(inst.nodes)
    edges = []
    cap = dict(inst.cap)
    cost = dict(inst.cost)
    of_edge = {}
    for u, v in inst.edges:
        x = ("edge", u, v)
        nodes.append(x)
        edges += [(u, x), (x, v)]
        cap[x] = min(inst.cap[u], inst.cap[v])
        cost[x] = 0
        of_edge[x] = (u, v)
    return Instance(tuple(nodes), tuple(edges), inst.terminals, cap, cost, inst.lam), of_edge


def extract_loads(inst: Instance, lam) -> LoadFunction:
    """Node and edge loads of some integer optimal multiflow (capacities must be even)."""
    if any(c % 2 for c in inst.cap.values()):
        raise PipelineError("extract_loads expects doubled capacities")
    split, of_edge = split_instance(inst)
    scheme = perturbation_scheme(split.nodes, split.cap)
    S = scheme.scale()
    base = solve_dual(split, lam).objective
    pert = solve_dual(split.with_costs(scheme.scaled_costs(split.cost)), S * lam).objective
    r = S * base - pert
    if r.denominator != 1 or r < 0:
        raise PipelineError(f"perturbation gap {r} is not a nonnegative integer")
    digits = scheme.digits(int(r))
    node, edge = {}, {}
    for v, d in zip(split.nodes, digits):
        if d > split.cap[v]:
            raise PipelineError(f"load digit {d} exceeds capacity at {v}")
        if v in of_edge:
            edge[of_edge[v]] = d
        else:
            node[v] = d
    return LoadFunction(node, edge)


# -- flows on H ---------------------------------------------------------------------


def loads_to_flow(g: LoadFunction, H: BDGraph, gs: GeodesicStructure) -> BDFlow:
    """Integer flow on compact H induced by loads ``g`` of a geodesic multiflow."""
    inst = gs.inst
    for v, x in g.node.items():
        if x and v not in gs.carrier_nodes:
            raise PipelineError(f"load {x} on node {v} outside the carrier")
    for e, x in g.edge.items():
        if x and e not in gs.carrier_edges:
            raise PipelineError(f"load {x} on edge {e} outside the carrier")
    f = [0] * len(H.edges)
    source_arcs = {}
    for i, e in enumerate(H.edges):
        r = e.role
        kind = r[0]
        if kind == "node":
            f[i] = g.node.get(r[1], 0)
        elif kind in ("zone", "cross", "gate"):
            f[i] = g.edge.get(inst.edge(r[1], r[2]), 0)
        elif kind == "hub":
            f[i] = g.node.get(r[1], 0)
        elif kind == "leg":
            w, s = r[1], r[2]
            f[i] = sum(
                g.edge.get(inst.edge(v, w), 0)
                for v in inst.adj[w]
                if gs.zone_of.get(v) == s and inst.edge(v, w) in gs.carrier_edges
            )
        elif kind == "source":
            source_arcs[i] = e
        else:
            raise PipelineError(f"unexpected edge role {r}")
    # Source arcs carry whatever balances their first-copy node.
    for i, e in source_arcs.items():
        x = e.v
        bal = sum(m * f[j] for j, m in H.incident[x] if j != i)
        f[i] = bal  # the source arc enters x, contributing -f[i]
        if f[i] < 0:
            raise PipelineError(f"negative source arc value at {x}")
    flow = BDFlow(H, f)
    errs = flow.errors()
    if errs:
        raise PipelineError("loads do not form a flow: " + errs[0])
    if not is_good(f, H):
        raise PipelineError("flow from loads is not good")
    return flow


@dataclass
class SaturationResult:
    flow: BDFlow  # on the expensive graph
    value: int  # max IBD value in the lower-bound-free graph
    target: int  # 2 c(E0)
    barrier: OddBarrier
    locked: frozenset


def saturating_ibd_flow(H: BDGraph, E0, rng=None) -> SaturationResult:
    """Integer good flow on expensive ``H`` saturating the locked edges ``E0``."""
    if H.kind != "expensive":
        raise PipelineError("saturation runs on the expensive graph")
    E0 = frozenset(E0)
    target = 2 * sum(H.edges[i].cap for i in E0)
    H1 = eliminate_lower_bounds(H, E0)
    g, barrier = max_ibd_flow(H1, rng)
    if g.value != target:
        raise PipelineError(
            f"maximum flow {g.value} in the lower-bound-free graph misses 2c(E0) = {target}; "
            f"barrier {barrier}"
        )
    by_role = {e.role: i for i, e in enumerate(H1.edges)}
    f = [0] * len(H.edges)
    for i, e in enumerate(H.edges):
        if i in E0:
            f[i] = e.cap
        else:
            f[i] = g.f[by_role[e.role]]
    for i in E0:
        r = H.edges[i].role
        if r[0] == "node":
            parts = [by_role[("split_in", r[1])], by_role[("split_out", r[1])]]
            caps = [H1.edges[j].cap for j in parts]
        else:
            parts = [by_role[("root",) + r[1:]]]
            caps = [2]
        if [g.f[j] for j in parts] != caps:
            raise PipelineError(f"locked edge {r} not saturated")
    flow = BDFlow(H, f)
    errs = flow_errors(H, f)
    if errs:
        raise PipelineError("mapped-back flow infeasible: " + errs[0])
    if not is_good(f, H):
        raise PipelineError("mapped-back flow is not good")
    return SaturationResult(flow, g.value, target, barrier, E0)


# -- top level ----------------------------------------------------------------------


@dataclass
class Certificates:
    lam: int
    zero_case: bool
    p: Fraction | None
    dual_objective: Fraction
    l_hat: dict
    rounded_objective: Fraction
    phi: Fraction
    value: Fraction
    cost: Fraction
    loads: LoadFunction | None = None
    saturation: SaturationResult | None = None
    cs_l: CsReport = field(default_factory=CsReport)
    cs_l_hat: CsReport = field(default_factory=CsReport)
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems and self.cs_l.ok and self.cs_l_hat.ok


class Solution(NamedTuple):
    F: Multiflow
    dual: DualSolution
    cert: Certificates


def _audit(inst: Instance, lam, F: Multiflow, l: Mapping, l_hat: Mapping, cert: Certificates) -> None:
    bad = cert.problems
    if not is_feasible(F, inst):
        bad.append("multiflow exceeds a node capacity")
    if not all(is_half_integral(w) for _, w in F):
        bad.append("multiflow weight not half-integral")
    if not all(is_half_integral(x) and x >= 0 for x in l_hat.values()):
        bad.append("rounded dual not half-integral and nonnegative")
    if not check_dual_feasible(inst, l, lam):
        bad.append("dual l infeasible")
    if not check_dual_feasible(inst, l_hat, lam):
        bad.append("rounded dual infeasible")
    if cert.phi != cert.dual_objective:
        bad.append(f"phi {cert.phi} != c.l {cert.dual_objective}")
    if cert.rounded_objective != cert.dual_objective:
        bad.append(f"c.l_hat {cert.rounded_objective} != c.l {cert.dual_objective}")
    cert.cs_l = check_complementary_slackness(F, l, inst, lam)
    cert.cs_l_hat = check_complementary_slackness(F, l_hat, inst, lam)


def solve_ncp_lambda(inst: Instance, lam=None, rng=None) -> Solution:
    """Half-integer optimal multiflow for ``lam * val(F) - a(F)`` with dual certificates."""
    require_valid(inst)
    if lam is None:
        lam = inst.lam
    if lam is None:
        raise ValueError("lambda not given")
    lam = int(lam)
    dbl = inst.doubled()
    dual = solve_dual(dbl, lam)
    l = dual.l
    gs = geodesic_structure(dbl, l, lam)
    loads = sat = None
    if isinstance(gs, ZeroFlowCase):
        F = Multiflow(())
    else:
        loads = extract_loads(dbl, lam)
        H = build_compact_H(gs, dbl.cap)
        f = loads_to_flow(loads, H, gs)
        F2 = decompose_good_flow(f.f, H, gs)
        for p, _ in F2:
            if not is_geodesic(p, gs):
                raise PipelineError(f"decomposed path {p} is not a geodesic")
        got = load_function(F2, dbl)
        if any(got.node[v] != loads.node.get(v, 0) for v in dbl.nodes) or any(
            got.edge[e] != loads.edge.get(e, 0) for e in dbl.edges
        ):
            raise PipelineError("decomposition changed the loads")
        F = F2.scaled(Fraction(1, 2))
        Hx = build_expensive_H(gs, dbl.cap)
        E0 = locked_edges(Hx, l)
        if E0:
            sat = saturating_ibd_flow(Hx, E0, rng)
    l_hat = round_dual(inst, l, lam)
    c_l = dual_objective(l, inst)
    cert = Certificates(
        lam=lam,
        zero_case=isinstance(gs, ZeroFlowCase),
        p=gs.p,
        dual_objective=c_l,
        l_hat=l_hat,
        rounded_objective=dual_objective(l_hat, inst),
        phi=objective_phi(F, inst, lam),
        value=multiflow_value(F),
        cost=multiflow_cost(F, inst),
        loads=loads,
        saturation=sat,
    )
    orig_dual = DualSolution(l, dual.phi, c_l)
    _audit(inst, lam, F, l, l_hat, cert)
    if not cert.ok:
        log.warning("certificate problems: %s", cert.problems + cert.cs_l.violations + cert.cs_l_hat.violations)
    return Solution(F, orig_dual, cert)


def solve_ncp(inst: Instance, rng=None) -> Solution:
    """Maximum-value multiflow of minimum cost, via a large enough lambda."""
    require_valid(inst)
    return solve_ncp_lambda(inst, lambda_for_ncp(inst), rng)
