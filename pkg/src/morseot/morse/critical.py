"""Discrete critical points of grid scalar fields.

Vertices are totally ordered by ``(value, row-major index)`` (simulation of
simplicity), so no two vertices ever compare equal. Links use the
8-neighborhood, walked in cyclic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..field import ScalarField

__all__ = [
    "RING",
    "CriticalPoint",
    "vertex_ranks",
    "neighbor_table",
    "classify_critical_points",
    "critical_census",
]

# (drow, dcol) around a vertex in cyclic order
RING = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))

REGULAR, MINIMUM, SADDLE, MAXIMUM = 0, 1, 2, 3
KIND_NAMES = {MINIMUM: "minimum", SADDLE: "saddle", MAXIMUM: "maximum"}


@dataclass(frozen=True)
class CriticalPoint:
    grid_index: tuple[int, int]
    kind: str
    value: float
    persistence: float = 0.0


def vertex_ranks(values: np.ndarray) -> np.ndarray:
    """Rank of each vertex in the ``(value, flat index)`` order, same shape."""
    flat = values.ravel()
    order = np.lexsort((np.arange(flat.size), flat))
    ranks = np.empty(flat.size, dtype=np.int64)
    ranks[order] = np.arange(flat.size)
    return ranks.reshape(values.shape)


@lru_cache(maxsize=16)
def neighbor_table(rows: int, cols: int) -> np.ndarray:
    """(rows*cols, 8) flat neighbor indices in RING order, -1 off the grid."""
    r, c = np.divmod(np.arange(rows * cols), cols)
    table = np.full((rows * cols, 8), -1, dtype=np.int64)
    for k, (dr, dc) in enumerate(RING):
        rr, cc = r + dr, c + dc
        ok = (rr >= 0) & (rr < rows) & (cc >= 0) & (cc < cols)
        table[ok, k] = rr[ok] * cols + cc[ok]
    table.setflags(write=False)
    return table


def _link_states(ranks: np.ndarray) -> np.ndarray:
    """+1 upper neighbor, -1 lower neighbor, 0 off the grid; shape (n, 8)."""
    flat = ranks.ravel()
    nb = neighbor_table(*ranks.shape)
    nbr = np.where(nb >= 0, flat[np.maximum(nb, 0)], -1)
    states = np.where(nbr > flat[:, None], 1, -1)
    states[nb < 0] = 0
    return states


def _components(mask: np.ndarray) -> np.ndarray:
    """Number of cyclic runs of True per row of an (n, 8) boolean array."""
    starts = mask & ~np.roll(mask, 1, axis=1)
    count = starts.sum(axis=1)
    # a full ring has no run start but is one component
    count[mask.all(axis=1)] = 1
    return count


def classify_vertices(ranks: np.ndarray) -> np.ndarray:
    """Integer kind code per vertex (REGULAR/MINIMUM/SADDLE/MAXIMUM).

    Interior saddles have at least two lower-link components. On the domain
    boundary the link is an open arc, and a vertex counts as a saddle when
    its *upper* link splits, i.e. when two superlevel-set components meet
    there.
    """
    states = _link_states(ranks)
    upper, lower = states == 1, states == -1
    interior = (states != 0).all(axis=1)
    kinds = np.zeros(states.shape[0], dtype=np.int8)
    saddle = np.where(interior, _components(lower) >= 2, _components(upper) >= 2)
    kinds[saddle] = SADDLE
    kinds[~upper.any(axis=1)] = MAXIMUM
    kinds[~lower.any(axis=1)] = MINIMUM
    return kinds.reshape(ranks.shape)


def classify_critical_points(f: ScalarField, with_persistence: bool = True) -> list[CriticalPoint]:
    """All critical vertices of ``f`` in row-major order.

    Maxima carry their superlevel persistence (``inf`` for the global
    maximum), minima their sublevel persistence, saddles the persistence of
    the maximum killed there (0 when they kill none).
    """
    ranks = vertex_ranks(f.values)
    kinds = classify_vertices(ranks)
    pers = {}
    if with_persistence:
        from .persistence import _merge_pairs

        for m, s, p in _merge_pairs(f.values, ranks):
            pers[m] = p
            if s is not None:
                pers[s] = max(pers.get(s, 0.0), p)
        down = ranks.size - 1 - ranks
        for m, s, p in _merge_pairs(-f.values, down):
            pers[m] = p
    out = []
    cols = f.cols
    for flat in np.flatnonzero(kinds.ravel()):
        kind = KIND_NAMES[int(kinds.flat[flat])]
        r, c = divmod(int(flat), cols)
        out.append(CriticalPoint((r, c), kind, float(f.values[r, c]), pers.get(int(flat), 0.0)))
    return out


def critical_census(f: ScalarField) -> dict[str, int]:
    """Counts of minima, saddles and maxima."""
    kinds = classify_vertices(vertex_ranks(f.values))
    return {name: int((kinds == code).sum()) for code, name in KIND_NAMES.items()}
