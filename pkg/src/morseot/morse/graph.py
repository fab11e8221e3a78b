"""Embedded Morse graphs: extraction from a simplified field, edge
sampling, rasterization."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from skimage.morphology import thin

from ..field import ScalarField
from .critical import MINIMUM, classify_vertices, neighbor_table, vertex_ranks
from .persistence import _merge_pairs

__all__ = [
    "Node",
    "Edge",
    "MorseGraph",
    "descending_manifolds",
    "extract_morse_graph",
    "sample_edges",
    "rasterize_graph",
    "euclidean_complex_distance",
]


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    kind: str = "critical"  # "critical" or "sampled"
    role: str = ""  # junction, endpoint, saddle, minimum, loop, sample

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, eq=False)
class Edge:
    a: int
    b: int
    polyline: np.ndarray

    def __post_init__(self):
        pts = np.array(self.polyline, dtype=np.float64).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "polyline", pts)

    @property
    def arc_length(self) -> float:
        return polyline_length(self.polyline)


@dataclass(eq=False)
class MorseGraph:
    nodes: list[Node]
    edges: list[Edge]
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(len(self.nodes), dtype=np.int64)
        for e in self.edges:
            deg[e.a] += 1
            deg[e.b] += 1
        return deg

    def positions(self) -> np.ndarray:
        return np.array([(n.x, n.y) for n in self.nodes], dtype=np.float64).reshape(-1, 2)

    def total_length(self) -> float:
        return float(sum(e.arc_length for e in self.edges))


def polyline_length(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    return float(np.sqrt((np.diff(pts, axis=0) ** 2).sum(axis=1)).sum())


# ---------------------------------------------------------------------------
# descending manifolds


def descending_manifolds(f: ScalarField) -> np.ndarray:
    """Label every vertex by the maximum its steepest-ascent path reaches.

    Steepest ascent picks, among higher 8-neighbors, the largest slope
    (value difference over grid distance); equal slopes go to the higher
    ranked neighbor. Labels are 0..k-1, numbered by decreasing maximum.
    """
    rows, cols = f.shape
    vals = f.values.ravel()
    ranks = vertex_ranks(f.values).ravel()
    nb = neighbor_table(rows, cols)
    n = vals.size
    target = np.arange(n)
    best = np.full(n, -np.inf)
    best_rank = np.full(n, -1, dtype=np.int64)
    for k in range(8):
        w = nb[:, k]
        ws = np.maximum(w, 0)
        up = (w >= 0) & (ranks[ws] > ranks)
        step = 1.0 if k % 2 == 0 else math.sqrt(2.0)
        slope = (vals[ws] - vals) / step
        better = up & ((slope > best) | ((slope == best) & (ranks[ws] > best_rank)))
        target = np.where(better, w, target)
        best = np.where(better, slope, best)
        best_rank = np.where(better, ranks[ws], best_rank)
    root = target.copy()
    while True:
        nxt = root[root]
        if np.array_equal(nxt, root):
            break
        root = nxt
    maxima = np.unique(root)
    maxima = maxima[np.argsort(-ranks[maxima])]
    relabel = np.empty(n, dtype=np.int64)
    relabel[maxima] = np.arange(maxima.size)
    return relabel[root].reshape(rows, cols)


# ---------------------------------------------------------------------------
# skeleton tracing


def _skeleton(labels: np.ndarray) -> np.ndarray:
    """Unit-width curves separating descending manifolds, plus the frame."""
    mask = np.zeros(labels.shape, dtype=bool)
    dv = labels[1:, :] != labels[:-1, :]
    dh = labels[:, 1:] != labels[:, :-1]
    mask[1:, :] |= dv
    mask[:-1, :] |= dv
    mask[:, 1:] |= dh
    mask[:, :-1] |= dh
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    skel = thin(mask)
    # thinning may cut the frame corners; put them back
    r1, c1 = labels.shape[0] - 1, labels.shape[1] - 1
    for r, c, dr, dc in ((0, 0, 1, 1), (0, c1, 1, -1), (r1, 0, -1, 1), (r1, c1, -1, -1)):
        if skel[r + dr, c] and skel[r, c + dc]:
            skel[r, c] = True
    return skel


def _pixel_adjacency(skel: np.ndarray) -> dict[int, list[int]]:
    """8-adjacency on skeleton pixels; a diagonal step is dropped when an
    orthogonal two-step path through another skeleton pixel exists."""
    rows, cols = skel.shape
    on = skel.ravel()
    nb = neighbor_table(rows, cols)
    adj = {}
    for v in np.flatnonzero(on).tolist():
        r, c = divmod(v, cols)
        out = []
        for k in range(8):
            w = int(nb[v, k])
            if w < 0 or not on[w]:
                continue
            if k % 2 == 1:
                wr, wc = divmod(w, cols)
                if skel[r, wc] or skel[wr, c]:
                    continue
            out.append(w)
        adj[v] = out
    return adj


def _snap(skel: np.ndarray, points, radius: float = 2.0):
    """Nearest skeleton pixel within ``radius`` cells of each point, or None."""
    rows, cols = skel.shape
    rad = int(math.floor(radius))
    out = []
    for r, c in points:
        best = None
        for dr in range(-rad, rad + 1):
            for dc in range(-rad, rad + 1):
                rr, cc = r + dr, c + dc
                if not (0 <= rr < rows and 0 <= cc < cols) or not skel[rr, cc]:
                    continue
                d = dr * dr + dc * dc
                if d > radius * radius:
                    continue
                key = (d, rr * cols + cc)
                if best is None or key < best:
                    best = key
        out.append(None if best is None else best[1])
    return out


def _trace(adj, special: dict[int, str], cols: int):
    """Turn the pixel graph into (node pixels, edges as pixel paths)."""
    deg = {v: len(ws) for v, ws in adj.items()}
    junction = {v for v, d in deg.items() if d >= 3}
    # cluster touching junction pixels into one node
    cluster_of = {}
    clusters = []
    for v in sorted(junction):
        if v in cluster_of:
            continue
        comp, stack = [], [v]
        cluster_of[v] = len(clusters)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w in junction and w not in cluster_of:
                    cluster_of[w] = len(clusters)
                    stack.append(w)
        clusters.append(sorted(comp))
    node_pixel = {}  # skeleton pixel -> representative pixel of its node
    roles = {}
    for comp in clusters:
        rc = np.array([divmod(u, cols) for u in comp], dtype=float)
        centroid = rc.mean(axis=0)
        d2 = ((rc - centroid) ** 2).sum(axis=1)
        rep = comp[int(np.argmin(d2))]
        for u in comp:
            node_pixel[u] = rep
        roles[rep] = "junction"
    for v, d in deg.items():
        if d == 1:
            node_pixel[v] = v
            roles[v] = "endpoint"
    for v, role in special.items():
        if v in adj and v not in node_pixel:
            node_pixel[v] = v
            roles[v] = role
    visited = set()
    paths = []

    def walk(start, first):
        path = [node_pixel[start]]
        if start != node_pixel[start]:
            path.append(start)
        prev, cur = start, first
        visited.add((start, first))
        visited.add((first, start))
        while True:
            path.append(cur)
            if cur in node_pixel:
                break
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            visited.add((prev, cur))
            visited.add((cur, prev))
        if node_pixel.get(cur, cur) != cur:
            path.append(node_pixel[cur])
        return path

    for v in sorted(node_pixel):
        for w in adj[v]:
            if (v, w) in visited:
                continue
            if node_pixel.get(w) is not None and node_pixel[w] == node_pixel[v]:
                visited.add((v, w))
                visited.add((w, v))
                continue
            paths.append(walk(v, w))
    # closed curves that touch no node
    for v in sorted(adj):
        if v in node_pixel or not adj[v]:
            continue
        if all((v, w) in visited for w in adj[v]):
            continue
        node_pixel[v] = v
        roles[v] = "loop"
        for w in adj[v]:
            if (v, w) not in visited:
                paths.append(walk(v, w))
    return node_pixel, roles, paths


def _dedupe(path):
    out = [path[0]]
    for p in path[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def extract_morse_graph(f: ScalarField, epsilon: float = 0.0, min_spur: int = 3, source: str = "") -> MorseGraph:
    """Morse graph of a (simplified, normalized) field.

    The skeleton bounding the descending manifolds of maxima is traced into
    a graph whose nodes are junctions, endpoints, loop anchors, and the
    saddles / minima that lie on (or within two cells of) the skeleton.
    Saddles are those where a maximum of persistence >= ``epsilon`` merges;
    minima need sublevel persistence >= ``epsilon``. Spurs shorter than
    ``min_spur`` pixels are pruned.
    """
    rows, cols = f.shape
    labels = descending_manifolds(f)
    n_labels = int(labels.max()) + 1
    if n_labels == 1:
        warnings.warn("field has a single maximum; Morse graph is the domain frame", stacklevel=2)
    skel = _skeleton(labels)

    ranks = vertex_ranks(f.values)
    saddles = sorted({s for _, s, p in _merge_pairs(f.values, ranks) if s is not None and p >= epsilon})
    kinds = classify_vertices(ranks).ravel()
    down = ranks.size - 1 - ranks
    minima = sorted(
        m for m, _, p in _merge_pairs(-f.values, down) if p >= epsilon and kinds[m] == MINIMUM
    )
    special = {}
    for flat, px in zip(saddles, _snap(skel, [divmod(s, cols) for s in saddles])):
        if px is not None:
            special.setdefault(px, "saddle")
    for flat, px in zip(minima, _snap(skel, [divmod(m, cols) for m in minima])):
        if px is not None:
            special.setdefault(px, "minimum")

    adj = _pixel_adjacency(skel)
    node_pixel, roles, paths = _trace(adj, special, cols)
    paths = [_dedupe(p) for p in paths]
    paths = _prune_spurs(paths, roles, min_spur)
    paths, roles = _merge_pass_through(paths, roles)
    paths, roles = _split_loops(paths, roles)

    used = sorted({p[0] for p in paths} | {p[-1] for p in paths})
    index = {px: i for i, px in enumerate(used)}

    def xy(px):
        r, c = divmod(px, cols)
        return (c / (cols - 1), r / (rows - 1))

    nodes = [Node(i, *xy(px), kind="critical", role=roles.get(px, "junction")) for i, px in enumerate(used)]
    edges = [Edge(index[p[0]], index[p[-1]], [xy(px) for px in p]) for p in paths]
    meta = {"epsilon": float(epsilon), "source": source or f.name, "n_manifolds": n_labels}
    return MorseGraph(nodes, edges, meta)


def _endpoint_counts(paths):
    deg = {}
    for p in paths:
        deg[p[0]] = deg.get(p[0], 0) + 1
        deg[p[-1]] = deg.get(p[-1], 0) + 1
    return deg


def _prune_spurs(paths, roles, min_spur):
    """Drop short dangling curves left over by thinning."""
    if min_spur <= 0:
        return paths
    deg = _endpoint_counts(paths)
    keep = []
    for p in paths:
        dangling = (deg[p[0]] == 1) != (deg[p[-1]] == 1)
        if dangling and len(p) <= min_spur:
            continue
        keep.append(p)
    return keep


def _merge_pass_through(paths, roles):
    """Join the two curves meeting at a node left with degree 2, unless the
    node is a saddle or minimum."""
    paths = [list(p) for p in paths]
    changed = True
    while changed:
        changed = False
        deg = _endpoint_counts(paths)
        for v, d in sorted(deg.items()):
            if d != 2 or roles.get(v) in ("saddle", "minimum"):
                continue
            inc = [i for i, p in enumerate(paths) if p[0] == v or p[-1] == v]
            if len(inc) != 2:
                continue  # self-loop
            i, j = inc
            a, b = paths[i], paths[j]
            if a[0] == v:
                a = a[::-1]
            if b[-1] == v:
                b = b[::-1]
            joined = a + b[1:]
            paths = [p for k, p in enumerate(paths) if k not in (i, j)] + [joined]
            roles.pop(v, None)
            changed = True
            break
    return paths, roles


def _split_loops(paths, roles):
    """Give every closed curve an interior node so no edge is a self-loop."""
    out = []
    for p in paths:
        if p[0] == p[-1] and len(p) >= 3:
            mid = len(p) // 2
            roles.setdefault(p[mid], "loop")
            out.append(p[: mid + 1])
            out.append(p[mid:])
        elif p[0] != p[-1]:
            out.append(p)
    return out, roles


# ---------------------------------------------------------------------------
# sampling and rasterization


def _cut_polyline(pts: np.ndarray, cuts: list[float]):
    """Split a polyline at the given increasing arc-length positions."""
    seg = np.sqrt((np.diff(pts, axis=0) ** 2).sum(axis=1))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    pieces = []
    current = [pts[0]]
    k = 0
    for s in cuts:
        while k + 1 < len(cum) and cum[k + 1] <= s:
            k += 1
            current.append(pts[k])
        if k + 1 < len(cum):
            t = (s - cum[k]) / seg[k] if seg[k] > 0 else 0.0
            p = pts[k] + t * (pts[k + 1] - pts[k])
        else:
            p = pts[-1]
        if np.array_equal(current[-1], p):
            current[-1] = p
        else:
            current.append(p)
        pieces.append(np.array(current))
        current = [p]
    current.extend(pts[k + 1 :])
    pieces.append(np.array(current))
    return pieces


def sample_edges(g: MorseGraph, spacing: float = 0.05) -> MorseGraph:
    """Insert degree-2 ``sampled`` nodes every ``spacing`` units of arc length
    along each edge. Original nodes keep their ids.

    ``meta["parent_edge"]`` records, per node, the index of the input edge a
    sampled node was placed on (-1 for input nodes).
    """
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    nodes = list(g.nodes)
    parent = [-1] * len(nodes)
    edges = []
    for idx, e in enumerate(g.edges):
        length = e.arc_length
        k = max(0, math.ceil(length / spacing - 1e-9) - 1)
        if k == 0:
            edges.append(e)
            continue
        pieces = _cut_polyline(e.polyline, [spacing * (i + 1) for i in range(k)])
        ids = [e.a]
        for piece in pieces[:-1]:
            x, y = piece[-1]
            nodes.append(Node(len(nodes), float(x), float(y), kind="sampled", role="sample"))
            parent.append(idx)
            ids.append(len(nodes) - 1)
        ids.append(e.b)
        pieces[0][0] = e.polyline[0]
        pieces[-1][-1] = e.polyline[-1]
        for (a, b), piece in zip(zip(ids, ids[1:]), pieces):
            edges.append(Edge(a, b, piece))
    meta = dict(g.meta)
    meta["spacing"] = float(spacing)
    meta["parent_edge"] = parent
    return MorseGraph(nodes, edges, meta)


def _segment_cells(p0, p1, rows, cols):
    """Grid cells crossed by a segment in normalized coordinates."""
    x0, y0 = p0[0] * cols, p0[1] * rows
    x1, y1 = p1[0] * cols, p1[1] * rows

    def cell(x, y):
        return min(max(int(math.floor(x)), 0), cols - 1), min(max(int(math.floor(y)), 0), rows - 1)

    cx, cy = cell(x0, y0)
    ex, ey = cell(x1, y1)
    out = [(cy, cx)]
    dx, dy = x1 - x0, y1 - y0
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    tdx = abs(1.0 / dx) if dx != 0 else math.inf
    tdy = abs(1.0 / dy) if dy != 0 else math.inf
    tx = ((cx + (sx > 0)) - x0) / dx if dx != 0 else math.inf
    ty = ((cy + (sy > 0)) - y0) / dy if dy != 0 else math.inf
    guard = abs(ex - cx) + abs(ey - cy) + 2
    while (cx, cy) != (ex, ey) and guard > 0:
        guard -= 1
        if tx < ty:
            cx += sx
            tx += tdx
        elif ty < tx:
            cy += sy
            ty += tdy
        else:
            cx += sx
            cy += sy
            tx += tdx
            ty += tdy
        cx = min(max(cx, 0), cols - 1)
        cy = min(max(cy, 0), rows - 1)
        out.append((cy, cx))
    return out


def rasterize_graph(g: MorseGraph, rows: int, cols: int) -> np.ndarray:
    """Binary rows x cols image; a cell is 1 where any edge segment passes."""
    img = np.zeros((rows, cols), dtype=np.uint8)
    for e in g.edges:
        pts = e.polyline
        if len(pts) == 1:
            pts = np.vstack([pts, pts])
        for p0, p1 in zip(pts[:-1], pts[1:]):
            for r, c in _segment_cells(p0, p1, rows, cols):
                img[r, c] = 1
    for n in g.nodes:
        r, c = _segment_cells((n.x, n.y), (n.x, n.y), rows, cols)[0]
        img[r, c] = 1
    return img


def euclidean_complex_distance(g1: MorseGraph, g2: MorseGraph, rows: int, cols: int) -> float:
    """Frobenius norm between the rasterized graphs."""
    a = rasterize_graph(g1, rows, cols).astype(np.float64)
    b = rasterize_graph(g2, rows, cols).astype(np.float64)
    return float(np.linalg.norm(a - b))
