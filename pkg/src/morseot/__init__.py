"""Morse graphs of 2D scalar fields compared with optimal-transport distances.

Typical use::

    from morseot import gen_sine_mixture, extract, normalize_pair, distance

    a = extract(gen_sine_mixture(128, 128, (2.75, 0), (0, 2.75))).network
    b = extract(gen_sine_mixture(128, 128, (2.75, 0), (0, 2.75), 0.3, 1)).network
    res = distance("fgw", *normalize_pair(a, b))
"""

from .analysis import (
    ColorAssignment,
    DistanceMatrix,
    classical_mds,
    color_transfer,
    distance_matrix,
    elbow_select,
    knn_classify,
    m_sweep,
    max_matched_distance,
)
from .field import (
    FieldError,
    ScalarField,
    euclidean_scalar_distance,
    gen_gaussian_mixture,
    gen_sine_mixture,
    load_field,
    normalize_field,
    save_field,
)
from .morse import MorseGraph, extract_morse_graph, persistence_graph, sample_edges, simplify
from .network import MeasureNetwork, largest_component, normalize_pair, to_measure_network
from .ot import KINDS, Coupling, DistanceResult, SolverConfig, distance
from .pipeline import extract

__version__ = "0.1.0"
