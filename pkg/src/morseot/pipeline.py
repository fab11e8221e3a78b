"""Field -> Morse graph -> measure network, with the usual preprocessing."""

from __future__ import annotations

from dataclasses import dataclass

from .field import ScalarField, normalize_field
from .morse.graph import MorseGraph, extract_morse_graph, sample_edges
from .morse.persistence import simplify
from .network import MeasureNetwork, largest_component, to_measure_network, uniform_distribution

DEFAULT_EPSILON = 0.07
DEFAULT_SPACING = 0.05


@dataclass(eq=False)
class Extraction:
    field: ScalarField  # normalized, simplified
    graph: MorseGraph  # critical nodes only
    sampled: MorseGraph
    network: MeasureNetwork


def extract(
    f: ScalarField,
    epsilon: float = DEFAULT_EPSILON,
    spacing: float = DEFAULT_SPACING,
    keep_largest: bool = False,
    distribution: str = "degree",
) -> Extraction:
    """Normalize, simplify at ``epsilon``, extract, sample every ``spacing``."""
    fs = simplify(normalize_field(f), epsilon)
    g = extract_morse_graph(fs, epsilon)
    if keep_largest:
        g = largest_component(g)
    gs, net = graph_network(g, spacing, False, distribution)
    return Extraction(fs, g, gs, net)


def graph_network(g: MorseGraph, spacing: float = DEFAULT_SPACING, keep_largest: bool = False, distribution: str = "degree"):
    """Sample a graph (unless it already has sampled nodes) and build its network."""
    if distribution not in ("degree", "uniform"):
        raise ValueError(f"unknown node distribution {distribution!r}")
    if keep_largest:
        g = largest_component(g)
    if not any(n.kind == "sampled" for n in g.nodes):
        g = sample_edges(g, spacing)
    net = to_measure_network(g)
    if distribution == "uniform":
        net = uniform_distribution(net)
    return g, net
