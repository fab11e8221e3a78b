"""Attributed measure networks built from Morse graphs."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial.distance import cdist

from .morse.graph import MorseGraph

__all__ = [
    "MeasureNetwork",
    "NetworkError",
    "DisconnectedGraphError",
    "to_measure_network",
    "largest_component",
    "normalize_pair",
    "uniform_distribution",
]


class NetworkError(ValueError):
    pass


class DisconnectedGraphError(NetworkError):
    def __init__(self, sizes):
        self.sizes = sorted(sizes, reverse=True)
        super().__init__(f"graph is disconnected; component sizes {self.sizes}")


def _frozen(a, ndim):
    arr = np.array(a, dtype=np.float64, copy=True)
    if ndim == 2 and arr.size == 0:
        arr = arr.reshape(0, 2)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MeasureNetwork:
    """Node probabilities ``p``, network function ``W`` and 2D attributes ``F``."""

    p: np.ndarray
    W: np.ndarray
    F: np.ndarray
    kinds: tuple = field(default=())

    def __post_init__(self):
        p, W, F = _frozen(self.p, 1), _frozen(self.W, 2), _frozen(self.F, 2)
        n = p.shape[0]
        if n == 0:
            raise NetworkError("network has no nodes")
        if W.shape != (n, n) or F.shape != (n, 2):
            raise NetworkError(f"inconsistent shapes p{p.shape} W{W.shape} F{F.shape}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "kinds", tuple(self.kinds) or ("critical",) * n)

    @property
    def n(self) -> int:
        return self.p.shape[0]


def _edge_weights(g: MorseGraph):
    """Sparse symmetric matrix of the shortest arc length between node pairs."""
    best = {}
    for e in g.edges:
        if e.a == e.b:
            continue
        key = (min(e.a, e.b), max(e.a, e.b))
        length = e.arc_length
        if key not in best or length < best[key]:
            best[key] = length
    n = g.n_nodes
    if not best:
        return coo_matrix((n, n)).tocsr()
    (i, j), w = zip(*best.keys()), list(best.values())
    i, j, w = np.array(i), np.array(j), np.array(w)
    # csgraph treats explicit zeros as missing edges
    w = np.maximum(w, np.finfo(float).tiny)
    return coo_matrix((np.r_[w, w], (np.r_[i, j], np.r_[j, i])), shape=(n, n)).tocsr()


def to_measure_network(g: MorseGraph) -> MeasureNetwork:
    """Degree-proportional probabilities, geodesic W, node positions as F."""
    adj = _edge_weights(g)
    n_comp, comp = connected_components(adj, directed=False)
    if n_comp > 1:
        raise DisconnectedGraphError(np.bincount(comp).tolist())
    deg = g.degrees()
    if deg.sum() == 0:
        raise NetworkError("graph has no edges")
    p = deg / deg.sum()
    W = dijkstra(adj, directed=False)
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    kinds = tuple(nd.kind for nd in g.nodes)
    return MeasureNetwork(p, W, g.positions(), kinds)


def largest_component(g: MorseGraph) -> MorseGraph:
    """Restrict a graph to its largest connected component (ties: lowest ids)."""
    adj = _edge_weights(g)
    n_comp, comp = connected_components(adj, directed=False)
    if n_comp == 1:
        return g
    keep = int(np.argmax(np.bincount(comp)))
    ids = [nd.id for nd in g.nodes if comp[nd.id] == keep]
    new_id = {old: k for k, old in enumerate(ids)}
    nodes = [replace(g.nodes[old], id=new_id[old]) for old in ids]
    edges = [replace(e, a=new_id[e.a], b=new_id[e.b]) for e in g.edges if e.a in new_id]
    meta = dict(g.meta)
    if "parent_edge" in meta:
        meta["parent_edge"] = [meta["parent_edge"][old] for old in ids]
    return MorseGraph(nodes, edges, meta)


def _rescale(x: np.ndarray, scale: float) -> np.ndarray:
    if scale <= 0 or abs(scale - 1.0) <= 1e-12:
        return x
    return x / scale


def normalize_pair(g1: MeasureNetwork, g2: MeasureNetwork) -> tuple[MeasureNetwork, MeasureNetwork]:
    """Scale both attribute sets by the largest cross-pair distance and each
    W by its own maximum, so every relevant quantity lies in [0, 1]."""
    cross = float(cdist(g1.F, g2.F).max())
    if cross == 0.0:
        raise NetworkError("all cross-pair attribute distances are zero")
    out = []
    for g in (g1, g2):
        w_max = float(g.W.max())
        out.append(replace(g, W=_rescale(g.W, w_max), F=_rescale(g.F, cross)))
    return out[0], out[1]


def uniform_distribution(g: MeasureNetwork) -> MeasureNetwork:
    return replace(g, p=np.full(g.n, 1.0 / g.n))
