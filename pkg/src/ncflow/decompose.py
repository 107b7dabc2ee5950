"""Decompose a good bidirected flow on H into weighted geodesics."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .bdgraph import OUT, BDGraph, flow_errors, is_good, path_image
from .geodesic import GeodesicStructure
from .model import Multiflow


class DecompositionError(ValueError):
    pass


def _trace(H: BDGraph, f: list, start, first: int) -> list:
    """Maximal walk along positive edges from ``start`` through edge ``first``.

    After each step the next edge must carry, at the current node, the mark
    opposite to the one just used to arrive.  The walk stops at the source;
    edges are tried in index order.
    """
    walk = [first]
    cur, need = _cross(H.edges[first], start)
    while cur != H.source:
        for i, m in H.incident[cur]:
            if f[i] > 0 and m == need and i not in walk:
                walk.append(i)
                cur, need = _cross(H.edges[i], cur)
                break
        else:
            raise DecompositionError(f"walk stuck at {cur}")
    return walk


def _cross(e, cur) -> tuple:
    if cur == e.u:
        return e.v, -e.mv
    return e.u, -e.mu


def decompose_paths(f: Sequence, H: BDGraph) -> list:
    """Closed q-q paths of H (edge index lists) with weights summing to ``f``."""
    errs = flow_errors(H, f)
    if errs:
        raise DecompositionError(errs[0])
    if not is_good(f, H):
        raise DecompositionError("flow is not good")
    f = [Fraction(x) for x in f]
    out = []
    for hub, loop, legs in H.hubs:
        while f[loop] > 0:
            fw = f[loop]
            pos = [s for s in sorted(legs, key=_term_order(H)) if f[legs[s]] > 0]
            pair = None
            for i, s in enumerate(pos):
                for t in pos[i + 1:]:
                    if not any(f[legs[p]] == fw for p in legs if p not in (s, t)):
                        pair = (s, t)
                        break
                if pair:
                    break
            if pair is None:
                raise DecompositionError(f"no admissible terminal pair at {hub}")
            s, t = pair
            qs = _trace(H, f, hub, legs[s])
            qt = _trace(H, f, hub, legs[t])
            path = list(reversed(qs)) + [loop] + qt
            alpha = min(f[i] for i in path)
            for p, j in legs.items():
                if p not in (s, t):
                    alpha = min(alpha, fw - f[j])
            for i in path:
                f[i] -= alpha
            out.append((path, alpha))
    while True:
        starts = [i for i, m in H.incident[H.source] if f[i] > 0 and m == OUT]
        if not starts:
            break
        path = _trace(H, f, H.source, min(starts))
        alpha = min(f[i] for i in path)
        for i in path:
            f[i] -= alpha
        out.append((path, alpha))
    if any(f):
        raise DecompositionError("flow left after stripping all paths")
    return out


def _term_order(H: BDGraph):
    if H.gs is None:
        return repr
    idx = H.gs.inst.index
    return lambda s: idx[s]


def decompose_good_flow(f: Sequence, H: BDGraph, gs: GeodesicStructure | None = None) -> Multiflow:
    """Geodesic multiflow generating ``f``; integral when ``f`` is."""
    if gs is not None and H.gs is not gs:
        raise DecompositionError("H was built from a different geodesic structure")
    items = [(path_image(p, H), w) for p, w in decompose_paths(f, H)]
    return Multiflow(tuple(items))


def generated_flow(paths: Sequence, H: BDGraph) -> list:
    """Edge values of ``sum w * chi(path)`` for weighted H-paths."""
    g = [Fraction(0)] * len(H.edges)
    for p, w in paths:
        for i in p:
            g[i] += w
    return g
