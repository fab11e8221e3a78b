"""Minimal deterministic SVG figures: heatmaps, Morse graphs, scatter plots
and curves. Coordinates use y up, matching the field convention."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

__all__ = ["hex_color", "heatmap_svg", "graph_svg", "scatter_svg", "curve_svg", "save_svg"]

CLASS_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def hex_color(rgb) -> str:
    r, g, b = (min(255, max(0, int(round(255 * float(c))))) for c in rgb)
    return f"#{r:02x}{g:02x}{b:02x}"


def _ramp(t: float) -> str:
    """Dark blue -> light yellow."""
    t = min(1.0, max(0.0, float(t)))
    lo, hi = np.array([0.05, 0.1, 0.35]), np.array([0.99, 0.95, 0.6])
    return hex_color(lo + t * (hi - lo))


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _doc(width, height, body) -> str:
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">'
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _esc(s) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def heatmap_svg(values, labels, cell: float = 12.0, title: str = "") -> str:
    D = np.asarray(values, dtype=np.float64)
    n = D.shape[0]
    finite = D[np.isfinite(D)]
    hi = float(finite.max()) if finite.size and finite.max() > 0 else 1.0
    margin = 60.0
    size = margin + n * cell + 10
    body = []
    if title:
        body.append(f'<text x="{_num(margin)}" y="14" font-size="12">{_esc(title)}</text>')
    for i in range(n):
        for j in range(n):
            v = D[i, j]
            fill = "#cccccc" if not math.isfinite(v) else _ramp(v / hi)
            body.append(f'<rect x="{_num(margin + j * cell)}" y="{_num(margin + i * cell)}" width="{_num(cell)}" height="{_num(cell)}" fill="{fill}"/>')
    step = max(1, n // 20)
    for i in range(0, n, step):
        y = margin + (i + 0.7) * cell
        body.append(f'<text x="{_num(margin - 4)}" y="{_num(y)}" font-size="8" text-anchor="end">{_esc(labels[i])}</text>')
        x = margin + (i + 0.5) * cell
        body.append(f'<text x="{_num(x)}" y="{_num(margin - 4)}" font-size="8" text-anchor="middle">{_esc(labels[i])}</text>')
    return _doc(size, size, body)


def graph_svg(graph, node_colors=None, hollow=None, field=None, size: float = 400.0, max_cells: int = 64, title: str = "") -> str:
    """Morse graph drawn over an optional (downsampled) field raster.

    Hollow nodes are drawn as stroked circles without fill.
    """
    pad = 12.0
    top = 18.0 if title else 0.0
    span = size - 2 * pad

    def px(x, y):
        return pad + x * span, top + pad + (1.0 - y) * span

    body = []
    if title:
        body.append(f'<text x="{_num(pad)}" y="14" font-size="12">{_esc(title)}</text>')
    if field is not None:
        vals = np.asarray(field.values if hasattr(field, "values") else field, dtype=np.float64)
        rows, cols = vals.shape
        sr, sc = max(1, math.ceil(rows / max_cells)), max(1, math.ceil(cols / max_cells))
        sub = vals[::sr, ::sc]
        lo, hi = float(sub.min()), float(sub.max())
        scale = hi - lo if hi > lo else 1.0
        h, w = span / sub.shape[0], span / sub.shape[1]
        for r in range(sub.shape[0]):
            for c in range(sub.shape[1]):
                x, y = pad + c * w, top + pad + (sub.shape[0] - 1 - r) * h
                body.append(f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w + 0.3)}" height="{_num(h + 0.3)}" fill="{_ramp((sub[r, c] - lo) / scale)}"/>')
    for e in graph.edges:
        pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in (px(x, y) for x, y in e.polyline))
        body.append(f'<polyline points="{pts}" fill="none" stroke="#222222" stroke-width="1.5"/>')
    for k, n in enumerate(graph.nodes):
        cx, cy = px(n.x, n.y)
        r = 4.0 if n.kind == "critical" else 2.5
        if hollow is not None and hollow[k]:
            body.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="none" stroke="#000000" stroke-width="1"/>')
            continue
        fill = hex_color(node_colors[k]) if node_colors is not None else "#ffffff"
        body.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="{fill}" stroke="#000000" stroke-width="0.5"/>')
    return _doc(size, size + top, body)


def _frame(xs, ys, size, pad):
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    sx = (size - 2 * pad) / (x1 - x0) if x1 > x0 else 1.0
    sy = (size - 2 * pad) / (y1 - y0) if y1 > y0 else 1.0

    def tr(x, y):
        return pad + (x - x0) * sx, size - pad - (y - y0) * sy

    return tr


def scatter_svg(X, classes=None, size: float = 400.0, title: str = "") -> str:
    """2D scatter; ``classes`` selects point colors (sorted class order)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] == 1:
        X = np.column_stack([X[:, 0], np.zeros(len(X))])
    tr = _frame(X[:, 0], X[:, 1], size, 20.0)
    order = sorted(set(classes)) if classes is not None else []
    body = [f'<text x="20" y="14" font-size="12">{_esc(title)}</text>'] if title else []
    for i, (x, y) in enumerate(X[:, :2]):
        cx, cy = tr(x, y)
        color = CLASS_COLORS[order.index(classes[i]) % len(CLASS_COLORS)] if classes is not None else CLASS_COLORS[0]
        body.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="3" fill="{color}" fill-opacity="0.8"/>')
    for k, c in enumerate(order):
        body.append(f'<circle cx="{_num(size - 80)}" cy="{_num(20 + 14 * k)}" r="4" fill="{CLASS_COLORS[k % len(CLASS_COLORS)]}"/>')
        body.append(f'<text x="{_num(size - 70)}" y="{_num(24 + 14 * k)}" font-size="10">{_esc(c)}</text>')
    return _doc(size, size, body)


def curve_svg(curve, marker=None, size: float = 400.0, title: str = "") -> str:
    """Polyline through ``(x, y)`` points with an optional highlighted x."""
    pts = np.asarray(curve, dtype=np.float64)
    tr = _frame(pts[:, 0], pts[:, 1], size, 30.0)
    line = " ".join(f"{_num(a)},{_num(b)}" for a, b in (tr(x, y) for x, y in pts))
    body = [f'<text x="30" y="16" font-size="12">{_esc(title)}</text>'] if title else []
    body.append(f'<polyline points="{line}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    for x, y in pts:
        cx, cy = tr(x, y)
        fill = "#d62728" if marker is not None and x == marker else "#1f77b4"
        body.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="3" fill="{fill}"/>')
    return _doc(size, size, body)


def save_svg(path, text: str) -> None:
    Path(path).write_text(text)
