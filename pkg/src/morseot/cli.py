"""Command-line front end.

Every subcommand accepts ``--config FILE``: a JSON object whose keys are
the subcommand's option names (dashes or underscores). Config values act
as defaults; flags given on the command line win. Unknown keys are
rejected. Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__, datasets
from .analysis import (
    EUCLIDEAN_KINDS,
    color_transfer,
    classical_mds,
    distance_matrix,
    elbow_select,
    knn_classify,
    m_sweep,
    stratified_split,
)
from .field import gen_gaussian_mixture, gen_sine_mixture, load_field, normalize_field, save_field
from .morse import extract_morse_graph, persistence_graph, simplify
from .network import normalize_pair
from .ot.solvers import KINDS, SolverConfig, distance
from .pipeline import extract, graph_network
from . import serialize as ser
from . import svg

FORMATS = ("plain-text", "csv")
GENERATORS = ("sine", "gaussian", "sn", "rotating", "random", "temporal")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument handling


def _floats(n):
    def parse(s):
        parts = s.replace(",", " ").split()
        if len(parts) != n:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {s!r}")
        return [float(p) for p in parts]

    return parse


def _grid(s):
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    if isinstance(s, list):
        return [float(v) for v in s]
    if ":" in s:
        a, b, h = (float(v) for v in s.split(":"))
        if h <= 0 or b < a:
            raise argparse.ArgumentTypeError(f"bad range {s!r}")
        n = int(round((b - a) / h))
        return [round(a + i * h, 12) for i in range(n + 1)]
    return [float(v) for v in s.split(",") if v.strip()]


def _add_extraction(p):
    g = p.add_argument_group("extraction")
    g.add_argument("--epsilon", type=float, default=0.07, help="persistence threshold in [0, 1] (default 0.07)")
    g.add_argument("--spacing", type=float, default=0.05, help="edge sampling interval (default 0.05)")
    g.add_argument("--distribution", choices=("degree", "uniform"), default="degree", help="node probabilities")
    g.add_argument("--largest-component", action="store_true", help="keep only the largest connected component")
    g.add_argument("--format", choices=FORMATS, default=None, help="field file format (default: by extension)")


def _add_solver(p, with_kind=True, default_kind="fgw"):
    g = p.add_argument_group("solver")
    if with_kind:
        g.add_argument("--kind", choices=KINDS, default=default_kind)
    g.add_argument("--q", type=float, default=2.0)
    g.add_argument("--alpha", type=float, default=0.5)
    g.add_argument("--m", type=float, default=1.0, help="transported mass for partial kinds")
    g.add_argument("--max-iterations", type=int, default=1000)
    g.add_argument("--tolerance", type=float, default=1e-9)
    g.add_argument("--restarts", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morseot", description="Morse graphs compared with optimal transport.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help):
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--config", help="JSON file of option defaults")
        p.add_argument("--manifest", help="write a run manifest to this path")
        return p

    p = command("generate", "synthesize scalar fields")
    p.add_argument("--generator", choices=GENERATORS, default="sine")
    p.add_argument("--rows", type=int, default=128)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--freq1", type=_floats(2), default=list(datasets.SINE_FREQ1), metavar="FX,FY")
    p.add_argument("--freq2", type=_floats(2), default=list(datasets.SINE_FREQ2), metavar="FX,FY")
    p.add_argument("--component", type=_floats(4), action="append", metavar="U,V,SIGMA,AMP", help="Gaussian component (repeatable)")
    p.add_argument("--angle", type=float, default=0.0, help="rotation in radians")
    p.add_argument("--noise-amp", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=100, help="instances per class, or time steps")
    p.add_argument("--format", choices=FORMATS, default="plain-text")
    p.add_argument("--out", help="output file (single-field generators)")
    p.add_argument("--out-dir", help="output directory (collections)")

    p = command("extract", "extract a Morse graph from a field")
    p.add_argument("--input", help="field file")
    _add_extraction(p)
    p.add_argument("--sampled", action="store_true", help="write the graph with sampled nodes")
    p.add_argument("--out", help="graph JSON (default: stdout)")
    p.add_argument("--persistence-csv", help="persistence graph CSV")
    p.add_argument("--eps-grid", type=_grid, default="0:1:0.01", help="epsilon grid for the persistence graph")
    p.add_argument("--svg", help="field with overlaid graph")

    p = command("compare", "distance between two fields or graph JSONs")
    p.add_argument("inputs", nargs="*", help="source and target (field files or graph JSON)")
    _add_extraction(p)
    _add_solver(p)
    p.add_argument("--out", help="result JSON (default: stdout)")
    p.add_argument("--coupling-csv")
    p.add_argument("--trace-csv")
    p.add_argument("--colors-json")
    p.add_argument("--svg", help="prefix for source/target color-transfer SVGs")
    p.add_argument("--colormap", choices=("hue-lightness", "corners"), default="hue-lightness")

    p = command("batch", "pairwise distance matrices with MDS and kNN")
    p.add_argument("inputs", nargs="*", help="field files or graph JSON")
    p.add_argument("--list", help="CSV with columns file,label")
    p.add_argument("--kinds", default="w,gw,fgw", help="comma-separated distance kinds (OT or euclidean_*)")
    _add_extraction(p)
    _add_solver(p, with_kind=False)
    p.add_argument("--out-dir", required=False)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--allow-missing", action="store_true", help="keep going when pairs fail")
    p.add_argument("--pairs", choices=("all", "knn"), default="all", help="'knn': only test-by-train pairs")
    p.add_argument("--mds-dim", type=int, default=2)
    p.add_argument("--k", type=int, default=3, help="kNN neighbors; 0 picks k by cross-validation")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--m-grid", type=_grid, default=None, help="m sweep between the first two instances")

    p = command("mtune", "sweep the partial mass m and pick the elbow")
    p.add_argument("inputs", nargs="*")
    _add_extraction(p)
    _add_solver(p, default_kind="pfgw")
    p.add_argument("--m-grid", type=_grid, default="0.5:1:0.025")
    p.add_argument("--out-dir")
    p.add_argument("--colormap", choices=("hue-lightness", "corners"), default="hue-lightness")

    p = command("mds", "classical MDS of a distance-matrix CSV")
    p.add_argument("--matrix")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--labels", help="CSV file,label rows in matrix order (colors the SVG)")
    p.add_argument("--out", help="embedding CSV (default: stdout)")
    p.add_argument("--svg")

    p = command("knn", "kNN classification on a distance-matrix CSV")
    p.add_argument("--matrix")
    p.add_argument("--labels", help="CSV file,label rows in matrix order")
    p.add_argument("--k", type=int, default=3, help="0 picks k by cross-validation")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report JSON (default: stdout)")

    p = command("baseline", "Euclidean scalar or complex distance matrix")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--list", help="CSV with columns file,label")
    p.add_argument("--metric", choices=EUCLIDEAN_KINDS, default="euclidean_scalar")
    p.add_argument("--epsilon", type=float, default=0.07)
    p.add_argument("--format", choices=FORMATS, default=None)
    p.add_argument("--out", help="matrix CSV (default: stdout)")
    p.add_argument("--svg")
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        return action.choices[name]


def _apply_config(parser, argv, args):
    """Re-parse with the config file's values installed as defaults."""
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    sub = _subparser(parser, args.command)
    dests = {a.dest for a in sub._actions} - {"help", "config"}
    defaults, unknown = {}, []
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            unknown.append(key)
            continue
        action = next(a for a in sub._actions if a.dest == dest)
        if isinstance(value, str) and action.type is not None and action.nargs is None:
            value = action.type(value)
        elif action.type is _grid and isinstance(value, list):
            value = _grid(value)
        defaults[dest] = value
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(args.q, args.alpha, args.m, args.max_iterations, args.tolerance, args.restarts, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _validate(args):
    eps = getattr(args, "epsilon", None)
    if eps is not None and not 0.0 <= eps <= 1.0:
        raise UsageError(f"--epsilon must lie in [0, 1], got {eps}")
    spacing = getattr(args, "spacing", None)
    if spacing is not None and not spacing > 0:
        raise UsageError("--spacing must be positive")
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be positive")
    if hasattr(args, "q"):
        _solver_config(args)


# ---------------------------------------------------------------------------
# shared helpers


def _field_format(path, fmt):
    return fmt or ("csv" if str(path).lower().endswith(".csv") else "plain-text")


def _load_instance(path, args):
    """(field or None, critical graph, sampled graph, network) for a path."""
    if str(path).lower().endswith(".json"):
        g = ser.load_graph(path)
        gs, net = graph_network(g, args.spacing, args.largest_component, args.distribution)
        return None, g, gs, net
    f = load_field(path, _field_format(path, args.format))
    ex = extract(f, args.epsilon, args.spacing, args.largest_component, args.distribution)
    return f, ex.graph, ex.sampled, ex.network


def _emit(path, text):
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _config_record(args) -> dict:
    rec = {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "manifest")}
    return json.loads(ser.dumps(rec))


def _write_manifest(path, args, outputs, runtimes=None, started=None):
    record = _config_record(args)
    digest = hashlib.sha256(json.dumps(record, sort_keys=True).encode()).hexdigest()
    manifest = {
        "version": __version__,
        "command": args.command,
        "config": record,
        "config_hash": digest,
        "outputs": sorted(str(o) for o in outputs),
        "runtimes": runtimes or {},
        "total_seconds": None if started is None else time.perf_counter() - started,
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    ser.write_json(path, manifest)


def _two_inputs(args):
    if len(args.inputs) != 2:
        raise UsageError(f"expected exactly 2 inputs, got {len(args.inputs)}")
    return args.inputs


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args):
    cols = args.cols or args.rows
    if min(args.rows, cols) < 2:
        raise UsageError("--rows and --cols must be at least 2")
    if args.noise_amp is not None and args.noise_amp < 0:
        raise UsageError("--noise-amp must be non-negative")
    ext = ".csv" if args.format == "csv" else ".txt"
    outputs = []
    if args.generator in ("sine", "gaussian"):
        if not args.out:
            raise UsageError(f"--out is required for the {args.generator} generator")
        noise = args.noise_amp or 0.0
        if args.generator == "sine":
            f = gen_sine_mixture(args.rows, cols, args.freq1, args.freq2, noise, args.seed)
        else:
            if not args.component:
                raise UsageError("the gaussian generator needs at least one --component")
            comps = [((u, v), s, a) for u, v, s, a in args.component]
            f = gen_gaussian_mixture(args.rows, cols, comps, args.angle, noise, args.seed)
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        save_field(f, args.out, args.format)
        return [args.out]
    if not args.out_dir:
        raise UsageError(f"--out-dir is required for the {args.generator} generator")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.generator == "sn":
        noise = 0.3 if args.noise_amp is None else args.noise_amp
        src, tgt = datasets.sn_pair(args.rows, cols, noise, args.seed)
        names, fields, labels = [f"source{ext}", f"target{ext}"], [src, tgt], ["source", "target"]
    elif args.generator == "temporal":
        noise = 0.01 if args.noise_amp is None else args.noise_amp
        fields, blocks = datasets.temporal_series(args.n, args.rows, noise_amp=noise, seed=args.seed)
        names, labels = [f"t{t:02d}{ext}" for t in range(len(fields))], blocks
    else:
        noise = 0.02 if args.noise_amp is None else args.noise_amp
        fields, classes = datasets.gaussian_collection(args.generator, args.seed, args.n, args.rows, noise)
        labels = ["binary" if c == 0 else "trinary" for c in classes]
        names = [f"{lab}_{i:03d}{ext}" for i, lab in enumerate(labels)]
    for name, f in zip(names, fields):
        save_field(f, out / name, args.format)
        outputs.append(out / name)
    ser.write_labels(out / "labels.csv", names, labels)
    outputs.append(out / "labels.csv")
    return outputs


def cmd_extract(args):
    if not args.input:
        raise UsageError("--input is required")
    f = load_field(args.input, _field_format(args.input, args.format))
    ex = extract(f, args.epsilon, args.spacing, args.largest_component)
    g = ex.sampled if args.sampled else ex.graph
    g.meta["source"] = Path(args.input).name
    outputs = []
    _emit(args.out, ser.dumps(ser.graph_to_dict(g)))
    if args.out:
        outputs.append(args.out)
    if args.persistence_csv:
        ser.save_persistence_csv(args.persistence_csv, persistence_graph(normalize_field(f), args.eps_grid))
        outputs.append(args.persistence_csv)
    if args.svg:
        svg.save_svg(args.svg, svg.graph_svg(ex.sampled, field=ex.field, title=f"epsilon={args.epsilon:g}"))
        outputs.append(args.svg)
    return outputs


def cmd_compare(args):
    a_path, b_path = _two_inputs(args)
    cfg = _solver_config(args)
    _, _, ga, na = _load_instance(a_path, args)
    _, _, gb, nb = _load_instance(b_path, args)
    x, y = normalize_pair(na, nb)
    res = distance(args.kind, x, y, cfg)
    outputs = []
    _emit(args.out, ser.dumps(ser.result_to_dict(res)))
    if args.out:
        outputs.append(args.out)
    if args.coupling_csv:
        ser.save_matrix_csv(args.coupling_csv, res.coupling.matrix)
        outputs.append(args.coupling_csv)
    if args.trace_csv:
        ser.save_trace_csv(args.trace_csv, res)
        outputs.append(args.trace_csv)
    if args.colors_json or args.svg:
        colors = color_transfer(x, y, res.coupling, args.colormap)
        if args.colors_json:
            ser.write_json(args.colors_json, ser.colors_to_dict(colors))
            outputs.append(args.colors_json)
        if args.svg:
            a_svg, b_svg = f"{args.svg}_source.svg", f"{args.svg}_target.svg"
            svg.save_svg(a_svg, svg.graph_svg(ga, colors.source_colors, title="source"))
            svg.save_svg(b_svg, svg.graph_svg(gb, colors.target_colors, colors.hollow, title=f"target ({args.kind})"))
            outputs += [a_svg, b_svg]
    return outputs


def _batch_inputs(args):
    if args.list:
        files, labels = ser.read_labels(args.list)
    else:
        files, labels = list(args.inputs), None
    if len(files) < 2:
        raise UsageError("need at least 2 instances")
    return files, labels


def cmd_batch(args):
    if not args.out_dir:
        raise UsageError("--out-dir is required")
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS and k not in EUCLIDEAN_KINDS]
    if bad:
        raise UsageError(f"unknown kind(s) {bad}")
    if args.pairs == "knn" and args.list is None:
        raise UsageError("--pairs knn needs labels (--list)")
    cfg = _solver_config(args)
    started = time.perf_counter()
    files, labels = _batch_inputs(args)
    names = [Path(f).stem for f in files]
    loaded = [_load_instance(f, args) for f in files]
    fields, graphs, nets = [x[0] for x in loaded], [x[1] for x in loaded], [x[3] for x in loaded]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    split = stratified_split(labels, args.train_fraction, args.split_seed) if labels is not None else None
    pairs = None
    if args.pairs == "knn":
        pairs = [(i, j) for i in split[1] for j in split[0]]
    outputs, runtimes = [], {}
    for kind in kinds:
        if kind == "euclidean_scalar":
            if any(f is None for f in fields):
                raise UsageError("euclidean_scalar needs field inputs")
            inst, shape = fields, None
        elif kind == "euclidean_complex":
            if any(f is None for f in fields):
                raise UsageError("euclidean_complex needs field inputs")
            inst, shape = graphs, fields[0].shape
        else:
            inst, shape = nets, None
        D = distance_matrix(inst, kind, cfg, names, pairs, shape, args.jobs, args.allow_missing)
        kdir = out / kind
        kdir.mkdir(exist_ok=True)
        ser.save_distance_matrix(kdir / "matrix.csv", D)
        svg.save_svg(kdir / "matrix.svg", svg.heatmap_svg(D.values, names, title=kind))
        outputs += [kdir / "matrix.csv", kdir / "matrix.svg"]
        runtimes[kind] = [{"i": names[i], "j": names[j], "seconds": t} for (i, j), t in sorted(D.runtimes.items())]
        if D.errors:
            ser.write_json(kdir / "failures.json", {f"{names[i]},{names[j]}": m for (i, j), m in sorted(D.errors.items())})
            outputs.append(kdir / "failures.json")
        if np.all(np.isfinite(D.values)) and args.mds_dim < D.n:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                X = classical_mds(D, args.mds_dim)
            ser.save_embedding(kdir / "mds.csv", names, X)
            svg.save_svg(kdir / "mds.svg", svg.scatter_svg(X, labels, title=f"MDS ({kind})"))
            outputs += [kdir / "mds.csv", kdir / "mds.svg"]
        if labels is not None:
            rep = knn_classify(D, labels, args.k or None, split=split)
            ser.write_json(kdir / "knn.json", ser.report_to_dict(rep))
            outputs.append(kdir / "knn.json")
    if args.m_grid:
        curve, results = m_sweep(nets[0], nets[1], args.m_grid, "pfgw", cfg)
        _save_sweep(out / "msweep.csv", curve, results)
        outputs.append(out / "msweep.csv")
    _write_manifest(args.manifest or out / "manifest.json", args, outputs, runtimes, started)
    return outputs


def _save_sweep(path, curve, results):
    rows = [[repr(m), repr(d), repr(r.distance)] for (m, d), r in zip(curve, results)]
    Path(path).write_text(ser.rows_to_csv(["m", "max_matched_distance", "distance"], rows))


def cmd_mtune(args):
    if not args.out_dir:
        raise UsageError("--out-dir is required")
    if args.kind not in ("pw", "pgw", "pfgw"):
        raise UsageError("mtune needs a partial kind (pw, pgw, pfgw)")
    ms = sorted(args.m_grid)
    if len(ms) < 4 or ms[0] <= 0 or ms[-1] > 1:
        raise UsageError("--m-grid needs at least 4 values in (0, 1]")
    cfg = _solver_config(args)
    started = time.perf_counter()
    a_path, b_path = _two_inputs(args)
    _, _, ga, na = _load_instance(a_path, args)
    _, _, gb, nb = _load_instance(b_path, args)
    curve, results = m_sweep(na, nb, ms, args.kind, cfg)
    elbow = elbow_select(curve)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _save_sweep(out / "sweep.csv", curve, results)
    ser.write_json(
        out / "elbow.json",
        {"m_star": elbow.m_star, "clear": elbow.clear, "curve": curve, "second_difference": list(elbow.second_difference)},
    )
    best = results[elbow.index]
    ser.save_result(out / "result.json", best)
    x, y = normalize_pair(na, nb)
    colors = color_transfer(x, y, best.coupling, args.colormap)
    ser.write_json(out / "colors.json", ser.colors_to_dict(colors))
    svg.save_svg(out / "curve.svg", svg.curve_svg(curve, elbow.m_star, title="maximum matched distance vs m"))
    svg.save_svg(out / "target.svg", svg.graph_svg(gb, colors.target_colors, colors.hollow, title=f"target, m={elbow.m_star:g}"))
    svg.save_svg(out / "source.svg", svg.graph_svg(ga, colors.source_colors, title="source"))
    if not elbow.clear:
        print("warning: no clear elbow; inspect sweep.csv", file=sys.stderr)
    outputs = [out / n for n in ("sweep.csv", "elbow.json", "result.json", "colors.json", "curve.svg", "target.svg", "source.svg")]
    _write_manifest(args.manifest or out / "manifest.json", args, outputs, None, started)
    return outputs


def _matrix_labels(args, n):
    if not args.labels:
        return None
    _, labels = ser.read_labels(args.labels)
    if len(labels) != n:
        raise UsageError(f"{args.labels} has {len(labels)} labels for a {n}x{n} matrix")
    return labels


def cmd_mds(args):
    if not args.matrix:
        raise UsageError("--matrix is required")
    D = ser.load_distance_matrix(args.matrix)
    if not 1 <= args.dim < D.n:
        raise UsageError(f"--dim must lie in [1, {D.n - 1}]")
    labels = _matrix_labels(args, D.n)
    X = classical_mds(D, args.dim)
    _emit(args.out, ser.embedding_csv(D.labels, X))
    outputs = [args.out] if args.out else []
    if args.svg:
        svg.save_svg(args.svg, svg.scatter_svg(X, labels, title="MDS"))
        outputs.append(args.svg)
    return outputs


def cmd_knn(args):
    if not args.matrix or not args.labels:
        raise UsageError("--matrix and --labels are required")
    D = ser.load_distance_matrix(args.matrix)
    labels = _matrix_labels(args, D.n)
    rep = knn_classify(D, labels, args.k or None, args.train_fraction, args.seed)
    _emit(args.out, ser.dumps(ser.report_to_dict(rep)))
    return [args.out] if args.out else []


def cmd_baseline(args):
    files = ser.read_labels(args.list)[0] if args.list else list(args.inputs)
    if len(files) < 2:
        raise UsageError("need at least 2 field inputs")
    fields = [load_field(f, _field_format(f, args.format)) for f in files]
    names = [Path(f).stem for f in files]
    if args.metric == "euclidean_scalar":
        D = distance_matrix(fields, "euclidean_scalar", labels=names)
    else:
        graphs = [extract_morse_graph(simplify(normalize_field(f), args.epsilon), args.epsilon) for f in fields]
        D = distance_matrix(graphs, "euclidean_complex", labels=names, shape=fields[0].shape)
    _emit(args.out, ser.distance_matrix_csv(D))
    outputs = [args.out] if args.out else []
    if args.svg:
        svg.save_svg(args.svg, svg.heatmap_svg(D.values, names, title=args.metric))
        outputs.append(args.svg)
    return outputs


COMMANDS = {
    "generate": cmd_generate,
    "extract": cmd_extract,
    "compare": cmd_compare,
    "batch": cmd_batch,
    "mtune": cmd_mtune,
    "mds": cmd_mds,
    "knn": cmd_knn,
    "baseline": cmd_baseline,
}


# commands that always write a manifest into their output directory
SELF_MANIFEST = ("batch", "mtune")


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit with 2
        return int(exc.code or 0)
    try:
        if args.config:
            args = _apply_config(parser, argv, args)
        _validate(args)
        started = time.perf_counter()
        outputs = COMMANDS[args.command](args)
        if args.manifest and args.command not in SELF_MANIFEST:
            _write_manifest(args.manifest, args, outputs, None, started)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        _subparser(parser, args.command).print_usage(sys.stderr)
        print(f"morseot {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"morseot {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
