"""Persistence of maxima via the superlevel-set merge tree, and
persistence-guided simplification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field import ScalarField
from .critical import neighbor_table, vertex_ranks
from .unionfind import UnionFind

__all__ = ["PersistencePair", "persistence_pairs", "persistence_graph", "simplify"]


@dataclass(frozen=True)
class PersistencePair:
    maximum: tuple[int, int]
    saddle: tuple[int, int]
    persistence: float


def _merge_pairs(values, ranks, regions=None):
    """Sweep vertices from high to low, merging superlevel components.

    Yields ``(max_flat, saddle_flat, persistence)`` per dying component in
    sweep order, then ``(global_max_flat, None, inf)`` for each surviving
    component. With ``regions`` (a dict), the vertex set of each dying
    component at its death is stored under its maximum.
    """
    flat_vals = values.ravel()
    flat_ranks = ranks.ravel()
    n = flat_vals.size
    nb = neighbor_table(*values.shape)
    order = np.argsort(-flat_ranks, kind="stable")
    uf = UnionFind(n, keys=flat_ranks)
    seen = np.zeros(n, dtype=bool)
    members = {} if regions is not None else None
    out = []
    nb_list = nb.tolist()
    for v in order.tolist():
        roots = {uf.find(w) for w in nb_list[v] if w >= 0 and seen[w]}
        seen[v] = True
        if members is not None:
            members[v] = [v]
        if not roots:
            continue
        # elder rule: the component with the highest maximum survives
        ranked = sorted(roots, key=lambda r: flat_ranks[uf.elder[r]], reverse=True)
        for r in ranked[1:]:
            m = uf.elder[r]
            out.append((m, v, float(flat_vals[m] - flat_vals[v])))
            if members is not None:
                regions[m] = list(members[r])
        for r in ranked:
            a = uf.find(v)
            if members is not None:
                la, lb = members.pop(a), members.pop(r)
                if len(la) < len(lb):
                    la, lb = lb, la
                la.extend(lb)
            root = uf.union(a, r)
            if members is not None:
                members[root] = la
    survivors = sorted({uf.elder[uf.find(v)] for v in range(n)}, key=lambda m: -flat_ranks[m])
    out.extend((m, None, float("inf")) for m in survivors)
    return out


def persistence_pairs(f: ScalarField) -> list[PersistencePair]:
    """Finite (maximum, merge saddle, persistence) pairs in sweep order.

    The globally highest maximum of each connected component never dies and
    is not listed.
    """
    cols = f.cols
    pairs = []
    for m, s, p in _merge_pairs(f.values, vertex_ranks(f.values)):
        if s is None:
            continue
        pairs.append(PersistencePair(divmod(m, cols), divmod(s, cols), p))
    return pairs


def persistence_graph(f: ScalarField, eps_grid) -> list[tuple[float, int]]:
    """Number of maxima surviving an eps-simplification, for each eps."""
    eps_grid = [float(e) for e in eps_grid]
    if any(b < a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps_grid must be sorted ascending")
    merged = _merge_pairs(f.values, vertex_ranks(f.values))
    finite = np.array(sorted(p for _, s, p in merged if s is not None))
    n_global = sum(1 for _, s, _ in merged if s is None)
    out = []
    for eps in eps_grid:
        kept = finite.size - np.searchsorted(finite, eps, side="left")
        out.append((eps, int(n_global + kept)))
    return out


def _flatten(values, ranks, region, saddle):
    """Lower ``region`` to just below the saddle value, keeping an ascending
    path from every region vertex to the saddle."""
    rows, cols = values.shape
    flat = values.ravel()
    nb = neighbor_table(rows, cols)
    inside = np.zeros(flat.size, dtype=bool)
    inside[region] = True
    s_val = flat[saddle]
    ring = np.unique(nb[region].ravel())
    ring = ring[(ring >= 0) & ~inside[ring] & (ring != saddle)]
    floor = flat[ring].max() if ring.size else s_val - 1.0
    floor = min(floor, s_val)
    # breadth-first distance from the saddle, restricted to the region
    dist = {saddle: 0}
    frontier = [saddle]
    while frontier:
        nxt = []
        for v in frontier:
            for w in nb[v]:
                if w >= 0 and inside[w] and w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    depth = max(dist.values()) + 1
    gap = s_val - floor
    if gap <= 0:
        # plateau ties with the ring: drop strictly below the saddle anyway
        gap = 1e-9 * max(1.0, abs(s_val))
    for v in region:
        d = dist.get(v, depth)
        flat[v] = s_val - gap * d / (depth + 1)


def simplify(f: ScalarField, epsilon: float, max_passes: int = 8) -> ScalarField:
    """Remove every maximum whose persistence is below ``epsilon``.

    Each such maximum's superlevel component at its death is lowered to just
    under the merge saddle. Passes repeat until no sub-epsilon pair remains
    (ties in the input can need a second pass).
    """
    if epsilon <= 0:
        return f
    values = np.array(f.values, dtype=np.float64)
    for _ in range(max_passes):
        ranks = vertex_ranks(values)
        regions = {}
        merged = _merge_pairs(values, ranks, regions=regions)
        doomed = [(m, s) for m, s, p in merged if s is not None and p < epsilon]
        if not doomed:
            break
        # nested regions: higher saddles first, enclosing regions overwrite
        doomed.sort(key=lambda ms: -ranks.flat[ms[1]])
        for m, s in doomed:
            _flatten(values, ranks, regions[m], s)
    return f.with_values(values)
