"""Constraint-programming solver for the asymmetric TSP, modelled as a
Hamiltonian path with fixed endpoints over a graph variable.

The public surface:

  Model / solve          build a propagator configuration and search it
  GraphVar               the backtrackable graph domain
  parse_tsplib           read TSPLIB instances (ATSP and TSP)
  circuit_to_path        turn a circuit matrix into a path instance
  dp_oracle              exact dynamic-programming reference solver
  gen_random             reproducible random instance generator
"""

from .gen import gen_random
from .kernel import Contradiction, GraphVar, Propagator, Scheduler
from .oracle import SizeLimit, dp_oracle
from .search import (
    HEURISTICS,
    MODELS,
    RELAXATIONS,
    Model,
    SearchResult,
    solve,
)
from .tsplib import Instance, ParseError, circuit_to_path, parse_tsplib

__version__ = "0.1.0"

__all__ = [
    "Contradiction",
    "GraphVar",
    "HEURISTICS",
    "Instance",
    "MODELS",
    "Model",
    "ParseError",
    "Propagator",
    "RELAXATIONS",
    "Scheduler",
    "SearchResult",
    "SizeLimit",
    "circuit_to_path",
    "dp_oracle",
    "gen_random",
    "parse_tsplib",
    "solve",
    "__version__",
]
