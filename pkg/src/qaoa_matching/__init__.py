"""Exact QAOA+ simulation over graph matchings, with combinatorial oracles."""

from .ansatz import ControlMode, RunOutput, Schedule, Semantics, run_qaoa_plus
from .graph import Graph, build_graph, cycle, edge_adjacency, make_ordering, path, two_regular
from .matchings import MatchingCounts, enumerate_matchings, matching_counts
from .statevector import StateVector, distribution, prepare_initial, support

__all__ = [
    "ControlMode", "RunOutput", "Schedule", "Semantics", "run_qaoa_plus",
    "Graph", "build_graph", "cycle", "edge_adjacency", "make_ordering", "path", "two_regular",
    "MatchingCounts", "enumerate_matchings", "matching_counts",
    "StateVector", "distribution", "prepare_initial", "support",
]
