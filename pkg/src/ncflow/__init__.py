"""Half-integer min-cost free multiflows in node-capacitated undirected networks."""

from __future__ import annotations

from .dual import DualSolution, solve_dual
from .model import Instance, LoadFunction, Multiflow, load_function, validate_instance
from .pipeline import Certificates, Solution, solve_ncp, solve_ncp_lambda
from .rounding import round_dual

__all__ = [
    "Certificates",
    "DualSolution",
    "Instance",
    "LoadFunction",
    "Multiflow",
    "Solution",
    "load_function",
    "round_dual",
    "solve_dual",
    "solve_ncp",
    "solve_ncp_lambda",
    "validate_instance",
]
