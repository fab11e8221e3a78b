"""JSON and CSV interchange formats.

All writers are deterministic: keys keep insertion order, floats use the
shortest round-trip repr, and files end with a newline.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .analysis import ClassificationReport, ColorAssignment, DistanceMatrix
from .morse.graph import Edge, MorseGraph, Node
from .network import MeasureNetwork
from .ot.solvers import Coupling, DistanceResult

__all__ = [
    "GRAPH_SCHEMA",
    "NETWORK_SCHEMA",
    "RESULT_SCHEMA",
    "dumps",
    "write_json",
    "read_json",
    "graph_to_dict",
    "graph_from_dict",
    "save_graph",
    "load_graph",
    "network_to_dict",
    "network_from_dict",
    "save_network",
    "load_network",
    "result_to_dict",
    "save_result",
    "load_result",
    "save_matrix_csv",
    "save_trace_csv",
    "save_persistence_csv",
    "rows_to_csv",
    "distance_matrix_csv",
    "save_distance_matrix",
    "load_distance_matrix",
    "embedding_csv",
    "save_embedding",
    "report_to_dict",
    "colors_to_dict",
    "read_labels",
    "write_labels",
]

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["nodes", "edges", "meta"],
    "properties": {
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "x", "y", "kind"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "x": {"type": "number"},
                    "y": {"type": "number"},
                    "kind": {"enum": ["critical", "sampled"]},
                    "role": {"type": "string"},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "polyline"],
                "properties": {
                    "a": {"type": "integer", "minimum": 0},
                    "b": {"type": "integer", "minimum": 0},
                    "polyline": {"type": "array", "items": _POINT, "minItems": 1},
                },
            },
        },
        "meta": {"type": "object", "required": ["epsilon", "source"]},
    },
}

NETWORK_SCHEMA = {
    "type": "object",
    "required": ["p", "W", "F"],
    "properties": {
        "p": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "W": _MATRIX,
        "F": {"type": "array", "items": _POINT},
        "kinds": {"type": "array", "items": {"type": "string"}},
    },
}

RESULT_SCHEMA = {
    "type": "object",
    "required": ["distance", "objective", "converged", "iterations", "coupling"],
    "properties": {
        "kind": {"type": "string"},
        "distance": {"type": "number", "minimum": 0},
        "objective": {"type": "number"},
        "converged": {"type": "boolean"},
        "iterations": {"type": "integer", "minimum": 0},
        "restart_best": {"type": "integer", "minimum": 0},
        "mass": {"type": "number"},
        "coupling": _MATRIX,
    },
}


class FormatError(ValueError):
    pass


def _plain(obj):
    """Convert numpy containers and scalars to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=1, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path, schema=None):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None
    if schema is not None:
        _validate(data, schema, f"{path}: ")
    return data


def _validate(data, schema, prefix=""):
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise FormatError(f"{prefix}{where}: {exc.message}") from None


# --- Morse graphs ----------------------------------------------------------


def graph_to_dict(g: MorseGraph) -> dict:
    nodes = [{"id": n.id, "x": n.x, "y": n.y, "kind": n.kind, "role": n.role} for n in g.nodes]
    edges = [{"a": e.a, "b": e.b, "polyline": e.polyline} for e in g.edges]
    meta = {"epsilon": g.meta.get("epsilon", 0.0), "source": g.meta.get("source", "")}
    meta.update({k: v for k, v in g.meta.items() if k not in meta})
    return {"nodes": nodes, "edges": edges, "meta": meta}


def graph_from_dict(data: dict) -> MorseGraph:
    _validate(data, GRAPH_SCHEMA)
    nodes = sorted(data["nodes"], key=lambda n: n["id"])
    if [n["id"] for n in nodes] != list(range(len(nodes))):
        raise FormatError("node ids must be 0..n-1")
    out = [Node(n["id"], float(n["x"]), float(n["y"]), n["kind"], n.get("role", "")) for n in nodes]
    edges = []
    for e in data["edges"]:
        if e["a"] >= len(out) or e["b"] >= len(out):
            raise FormatError(f"edge ({e['a']}, {e['b']}) references a missing node")
        edges.append(Edge(e["a"], e["b"], e["polyline"]))
    return MorseGraph(out, edges, dict(data["meta"]))


def save_graph(path, g: MorseGraph) -> None:
    write_json(path, graph_to_dict(g))


def load_graph(path) -> MorseGraph:
    data = read_json(path, GRAPH_SCHEMA)
    try:
        return graph_from_dict(data)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


# --- measure networks -----------------------------------------------------


def network_to_dict(g: MeasureNetwork) -> dict:
    return {"p": g.p, "W": g.W, "F": g.F, "kinds": list(g.kinds)}


def network_from_dict(data: dict) -> MeasureNetwork:
    _validate(data, NETWORK_SCHEMA)
    return MeasureNetwork(data["p"], data["W"], data["F"], tuple(data.get("kinds", ())))


def save_network(path, g: MeasureNetwork) -> None:
    write_json(path, network_to_dict(g))


def load_network(path) -> MeasureNetwork:
    return network_from_dict(read_json(path, NETWORK_SCHEMA))


# --- distance results ------------------------------------------------------


def result_to_dict(res: DistanceResult) -> dict:
    return {
        "kind": res.kind,
        "distance": res.distance,
        "objective": res.objective,
        "converged": res.converged,
        "iterations": res.iterations,
        "restart_best": res.restart_best,
        "mass": res.coupling.mass,
        "coupling": res.coupling.matrix,
    }


def save_result(path, res: DistanceResult) -> None:
    write_json(path, result_to_dict(res))


def load_result(path) -> DistanceResult:
    d = read_json(path, RESULT_SCHEMA)
    C = np.array(d["coupling"], dtype=np.float64)
    mass = float(d.get("mass", C.sum()))
    kind = d.get("kind", "")
    coupling = Coupling(C, mass, "partial" if kind.startswith("p") else "full")
    return DistanceResult(d["distance"], d["objective"], coupling, d["iterations"], d["converged"], d.get("restart_best", 0), [], kind)


def _fmt(v) -> str:
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write_rows(path, header, rows) -> None:
    Path(path).write_text(rows_to_csv(header, rows))


def save_matrix_csv(path, M) -> None:
    """Dense matrix, one row per line, no header."""
    _write_rows(path, None, [[_fmt(v) for v in row] for row in np.atleast_2d(M)])


def save_trace_csv(path, res: DistanceResult) -> None:
    _write_rows(path, ["iteration", "objective"], [[i, _fmt(f)] for i, f in enumerate(res.trace)])


def save_persistence_csv(path, graph) -> None:
    _write_rows(path, ["epsilon", "n_maxima"], [[_fmt(e), n] for e, n in graph])


# --- analysis outputs -------------------------------------------------------


def distance_matrix_csv(d: DistanceMatrix) -> str:
    """Header row ``label,<labels...>``; uncomputed entries are left empty."""
    labels = [str(x) for x in d.labels]
    rows = [[lab] + [_fmt(v) for v in row] for lab, row in zip(labels, d.values)]
    return rows_to_csv(["label"] + labels, rows)


def save_distance_matrix(path, d: DistanceMatrix) -> None:
    Path(path).write_text(distance_matrix_csv(d))


def load_distance_matrix(path) -> DistanceMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["label"]:
        raise FormatError(f"{path}: missing 'label' header")
    labels = rows[0][1:]
    body = rows[1:]
    if len(body) != len(labels) or any(len(r) != len(labels) + 1 for r in body):
        raise FormatError(f"{path}: matrix is not square")
    if [r[0] for r in body] != labels:
        raise FormatError(f"{path}: row labels differ from column labels")
    try:
        vals = np.array([[float(v) if v else np.nan for v in r[1:]] for r in body])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return DistanceMatrix(labels, vals)


def embedding_csv(labels, X) -> str:
    X = np.asarray(X)
    cols = ["x", "y", "z"][: X.shape[1]] if X.shape[1] <= 3 else [f"x{i + 1}" for i in range(X.shape[1])]
    return rows_to_csv(["id"] + cols, [[str(lab)] + [_fmt(v) for v in row] for lab, row in zip(labels, X)])


def save_embedding(path, labels, X) -> None:
    Path(path).write_text(embedding_csv(labels, X))


def report_to_dict(rep: ClassificationReport) -> dict:
    return {
        "accuracy": rep.accuracy,
        "f1": {str(c): ("undefined" if v is None else v) for c, v in rep.f1.items()},
        "confusion": rep.confusion,
        "classes": [str(c) for c in rep.classes],
        "k": rep.k,
        "n_train": len(rep.train),
        "n_test": len(rep.test),
    }


def colors_to_dict(ca: ColorAssignment) -> dict:
    return {
        "colormap": ca.colormap,
        "source": [{"id": i, "color": c} for i, c in enumerate(ca.source_colors)],
        "target": [
            {"id": j, "color": c, "match": int(m), "hollow": bool(h)}
            for j, (c, m, h) in enumerate(zip(ca.target_colors, ca.match, ca.hollow))
        ],
    }


def write_labels(path, names, labels) -> None:
    _write_rows(path, ["file", "label"], [[n, lab] for n, lab in zip(names, labels)])


def read_labels(path):
    """``file,label`` CSV; file paths are resolved against the CSV's directory."""
    base = Path(path).parent
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["file", "label"]:
        raise FormatError(f"{path}: expected header 'file,label'")
    files, labels = [], []
    for line, r in enumerate(rows[1:], start=2):
        if len(r) != 2:
            raise FormatError(f"{path}: line {line}: expected 2 columns")
        files.append(str(base / r[0]))
        labels.append(r[1])
    return files, labels
