"""Line-oriented text formats for instances and solutions.

Instance::

    # comment
    node s cap 2 cost 1 terminal
    node v cap 1 cost 1
    edge s v
    lambda 10

Solution::

    lambda 10
    path 1/2 s v t
    dual v 7/1
    objective 7/1

Rationals are always written as ``p/q``; plain integers are accepted on input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import Instance, Multiflow


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(no, f"expected an integer, got {tok!r}") from None


def _frac(tok: str, no: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(no, f"expected a rational p/q, got {tok!r}") from None


def fmt_frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_instance(text: str) -> Instance:
    nodes, edges, terms = [], [], []
    cap, cost = {}, {}
    lam = None
    for no, tok in _lines(text):
        kw = tok[0]
        if kw == "node":
            if len(tok) not in (6, 7) or tok[2] != "cap" or tok[4] != "cost":
                raise ParseError(no, "expected: node <name> cap <int> cost <int> [terminal]")
            name = tok[1]
            nodes.append(name)
            cap[name] = _int(tok[3], no)
            cost[name] = _int(tok[5], no)
            if len(tok) == 7:
                if tok[6] != "terminal":
                    raise ParseError(no, f"unexpected {tok[6]!r}")
                terms.append(name)
        elif kw == "edge":
            if len(tok) != 3:
                raise ParseError(no, "expected: edge <name> <name>")
            edges.append((tok[1], tok[2]))
        elif kw == "lambda":
            if len(tok) != 2 or lam is not None:
                raise ParseError(no, "expected a single: lambda <int>")
            lam = _int(tok[1], no)
        else:
            raise ParseError(no, f"unknown keyword {kw!r}")
    return Instance(tuple(nodes), tuple(edges), frozenset(terms), cap, cost, lam)


def format_instance(inst: Instance) -> str:
    out = []
    for v in inst.nodes:
        tail = " terminal" if v in inst.terminals else ""
        out.append(f"node {v} cap {inst.cap[v]} cost {inst.cost[v]}{tail}")
    out += [f"edge {u} {v}" for u, v in inst.edges]
    if inst.lam is not None:
        out.append(f"lambda {inst.lam}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class SolutionRecord:
    F: Multiflow
    dual: dict
    objective: Fraction | None
    lam: int | None = None


def parse_solution(text: str) -> SolutionRecord:
    paths, dual = [], {}
    objective = lam = None
    for no, tok in _lines(text):
        kw = tok[0]
        if kw == "path":
            if len(tok) < 4:
                raise ParseError(no, "expected: path <p/q> <node> <node> ...")
            paths.append((tuple(tok[2:]), _frac(tok[1], no)))
        elif kw == "dual":
            if len(tok) != 3:
                raise ParseError(no, "expected: dual <node> <p/q>")
            dual[tok[1]] = _frac(tok[2], no)
        elif kw == "objective":
            if len(tok) != 2:
                raise ParseError(no, "expected: objective <p/q>")
            objective = _frac(tok[1], no)
        elif kw == "lambda":
            if len(tok) != 2:
                raise ParseError(no, "expected: lambda <int>")
            lam = _int(tok[1], no)
        else:
            raise ParseError(no, f"unknown keyword {kw!r}")
    return SolutionRecord(Multiflow(tuple(paths)), dual, objective, lam)


def format_solution(F: Multiflow, dual: Mapping, objective, lam=None, nodes=None, comments=()) -> str:
    out = [f"# {c}" for c in comments]
    if lam is not None:
        out.append(f"lambda {lam}")
    out += [f"path {fmt_frac(w)} " + " ".join(map(str, p)) for p, w in F]
    for v in nodes if nodes is not None else dual:
        out.append(f"dual {v} {fmt_frac(dual.get(v, 0))}")
    if objective is not None:
        out.append(f"objective {fmt_frac(objective)}")
    return "\n".join(out) + "\n"
