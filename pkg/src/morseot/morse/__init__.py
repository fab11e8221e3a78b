"""Critical points, persistence simplification and Morse graph extraction."""

from .critical import CriticalPoint, classify_critical_points, critical_census
from .graph import (
    Edge,
    MorseGraph,
    Node,
    descending_manifolds,
    euclidean_complex_distance,
    extract_morse_graph,
    rasterize_graph,
    sample_edges,
)
from .persistence import PersistencePair, persistence_graph, persistence_pairs, simplify

__all__ = [
    "CriticalPoint",
    "classify_critical_points",
    "critical_census",
    "PersistencePair",
    "persistence_pairs",
    "persistence_graph",
    "simplify",
    "Node",
    "Edge",
    "MorseGraph",
    "descending_manifolds",
    "extract_morse_graph",
    "sample_edges",
    "rasterize_graph",
    "euclidean_complex_distance",
]
