from __future__ import annotations

import sys

import pytest
from hypothesis import HealthCheck, settings

from ncflow.model import Instance

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def star_instance(lam=None) -> Instance:
    """K_{1,3}: terminals s, t, u around a unit-capacity hub v; a = 1 everywhere."""
    nodes = ("s", "t", "u", "v")
    return Instance(
        nodes,
        (("s", "v"), ("t", "v"), ("u", "v")),
        {"s", "t", "u"},
        {"s": 2, "t": 2, "u": 2, "v": 1},
        {v: 1 for v in nodes},
        lam,
    )


def chain_instance() -> Instance:
    nodes = ("s", "v", "t")
    return Instance(nodes, (("s", "v"), ("v", "t")), {"s", "t"}, {v: 1 for v in nodes}, {v: 1 for v in nodes})


def three_zone_instance() -> Instance:
    """Three zones around one central node w, plus a zone-crossing edge c-e.

    With l = 0 every terminal pair is at distance 20 and w sits at 10.
    """
    cost = dict(p=3, a=3, b=3, s=4, c=10, d=5, r=2, e=4, f=3, g=4, w=2)
    edges = (
        ("p", "a"), ("a", "b"), ("b", "w"),
        ("s", "c"), ("s", "d"), ("d", "w"),
        ("r", "e"), ("r", "f"), ("f", "g"), ("g", "w"),
        ("c", "e"),
    )
    return Instance(tuple(cost), edges, {"p", "s", "r"}, {v: 2 for v in cost}, cost)


@pytest.fixture
def star():
    return star_instance()


@pytest.fixture
def chain():
    return chain_instance()


@pytest.fixture
def three_zone():
    return three_zone_instance()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for name in sorted(results):
            terminalreporter.write_line(results[name])
