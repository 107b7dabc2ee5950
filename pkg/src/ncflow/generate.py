"""Deterministic random instances for tests and the command line."""

from __future__ import annotations

import random

from .bdgraph import IN, OUT, BDEdge, BDGraph
from .model import Instance


def random_instance(seed: int, size: int = 6, extra_edge_prob: float = 0.3) -> Instance:
    """Connected graph on ``size`` nodes, 2-4 terminals, c in [0, 3], a in [1, 5]."""
    if size < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    nodes = [f"v{i}" for i in range(size)]
    edges = set()
    for i in range(1, size):
        edges.add((nodes[rng.randrange(i)], nodes[i]))
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < extra_edge_prob:
                edges.add((nodes[i], nodes[j]))
    terminals = rng.sample(nodes, rng.randint(2, min(4, size)))
    cap = {v: rng.randint(0, 3) for v in nodes}
    cost = {v: rng.randint(1, 5) for v in nodes}
    return Instance(tuple(nodes), tuple(sorted(edges)), terminals, cap, cost)


def random_bd_graph(rng: random.Random, n: int | None = None) -> BDGraph:
    """Random bidirected graph with source ("q",), n <= 12 nodes and capacities 1..3.

    The first two edges leave the source so that most graphs carry flow.
    Loops have equal marks at both ends.
    """
    n = n or rng.randint(2, 12)
    nodes = [("q",)] + [("n", i) for i in range(1, n)]
    edges = []
    for j in range(rng.randint(n, 2 * n)):
        u = nodes[0] if j < 2 else rng.choice(nodes)
        v = rng.choice(nodes[1:])
        mu = OUT if u == nodes[0] else rng.choice((OUT, IN))
        mv = mu if u == v else rng.choice((OUT, IN))
        edges.append(BDEdge(u, v, mu, mv, rng.randint(1, 3), ("e", j)))
    return BDGraph(tuple(nodes), tuple(edges), nodes[0], "random")
