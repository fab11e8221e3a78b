"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line with its checks
and wall time, then asserts. Tolerances and time limits are fixed here and
must not be loosened.
"""

import itertools
import json
import math
import time
import warnings

import numpy as np
from scipy.spatial.distance import cdist

from morseot.analysis import (
    color_transfer,
    distance_matrix,
    elbow_select,
    knn_classify,
    m_sweep,
    stratified_split,
)
from morseot.cli import main
from morseot.datasets import gaussian_collection, random_gaussians, sine_source, sn_pair
from morseot.field import gen_sine_mixture, normalize_field
from morseot.morse import extract_morse_graph, persistence_graph, simplify
from morseot.network import MeasureNetwork, normalize_pair
from morseot.ot import SolverConfig, distance, fused_gw, gromov_wasserstein, wasserstein
from morseot.ot.solvers import attribute_cost
from morseot.pipeline import extract

from oracles import permutations, quad_objective, random_network, square_pair, transport_vertices


def _report(capsys, n, checks, elapsed, limit):
    """Print the criterion line and return whether everything held."""
    ok = all(v for _, v in checks) and elapsed < limit
    detail = ", ".join(f"{name}={'ok' if v else 'FAIL'}" for name, v in checks)
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} [{detail}] {elapsed:.2f}s (limit {limit}s)")
    return ok


def _fgw_value(A, B, C, alpha=0.5):
    M = cdist(A.F, B.F) ** 2
    return quad_objective(A.W, B.W, C, M, alpha)


# ---------------------------------------------------------------------------


def test_criterion_1_square_example(capsys):
    t0 = time.perf_counter()
    A, B = square_pair()
    w = wasserstein(A, B).distance
    gw = gromov_wasserstein(A, B, SolverConfig(restarts=5)).distance
    fgw = fused_gw(A, B, SolverConfig(alpha=0.5))
    elapsed = time.perf_counter() - t0
    # the oracle minimum over every vertex of the transport polytope (not timed)
    oracle = min(_fgw_value(A, B, C) for C in transport_vertices(A.p, B.p))
    checks = [
        ("W<=1e-9", w <= 1e-9),
        ("GW<=1e-6", gw <= 1e-6),
        ("FGW>0.05", fgw.distance > 0.05),
        ("oracle>0.05", math.sqrt(oracle) > 0.05),
        ("FGW=oracle", abs(fgw.objective - oracle) <= 1e-9),
    ]
    assert _report(capsys, 1, checks, elapsed, 1.0)


def test_criterion_2_reductions(capsys):
    rng = np.random.Generator(np.random.PCG64(2))
    t0 = time.perf_counter()
    worst_end, worst_partial = 0.0, 0.0
    for _ in range(20):
        a, b = random_network(rng), random_network(rng)
        w, gw, fgw = (distance(k, a, b).distance for k in ("w", "gw", "fgw"))
        worst_end = max(
            worst_end,
            abs(fused_gw(a, b, SolverConfig(alpha=0.0)).distance - w),
            abs(fused_gw(a, b, SolverConfig(alpha=1.0)).distance - gw),
        )
        for pk, full in (("pw", w), ("pgw", gw), ("pfgw", fgw)):
            worst_partial = max(worst_partial, abs(distance(pk, a, b, SolverConfig(m=1.0)).distance - full))
    elapsed = time.perf_counter() - t0
    checks = [("fgw-endpoints<=1e-9", worst_end <= 1e-9), ("partial-m1<=1e-8", worst_partial <= 1e-8)]
    assert _report(capsys, 2, checks, elapsed, 10.0)


def test_criterion_3_metric_properties(capsys):
    rng = np.random.Generator(np.random.PCG64(3))
    t0 = time.perf_counter()
    sym = tri = self_d = 0.0
    fgw_excess = -math.inf
    for _ in range(50):
        g = [random_network(rng) for _ in range(3)]
        d = {(i, j): wasserstein(g[i], g[j]).distance for i in range(3) for j in range(3)}
        sym = max(sym, max(abs(d[i, j] - d[j, i]) for i in range(3) for j in range(3)))
        self_d = max(self_d, max(d[i, i] for i in range(3)))
        for i, j, k in itertools.permutations(range(3)):
            tri = max(tri, d[i, k] - d[i, j] - d[j, k])
    for _ in range(50):
        g = [random_network(rng) for _ in range(3)]
        d12, d23, d13 = fused_gw(g[0], g[1]).distance, fused_gw(g[1], g[2]).distance, fused_gw(g[0], g[2]).distance
        fgw_excess = max(fgw_excess, d13 - math.sqrt(2) * (d12 + d23))
    elapsed = time.perf_counter() - t0
    checks = [
        ("symmetry<=1e-12", sym <= 1e-12),
        ("triangle<=1e-9", tri <= 1e-9),
        ("self=0", self_d == 0.0),
        ("fgw-relaxed<=1e-4", fgw_excess <= 1e-4),
    ]
    assert _report(capsys, 3, checks, elapsed, 30.0)


def test_criterion_4_small_oracles(capsys):
    rng = np.random.Generator(np.random.PCG64(4))
    t0 = time.perf_counter()
    w_err, gw_excess = 0.0, -math.inf
    for n in (3, 4):
        verts = transport_vertices(np.full(n, 1 / n), np.full(n, 1 / n))
        for _ in range(5):
            a, b = (MeasureNetwork(np.full(n, 1 / n), g.W, g.F) for g in (random_network(rng, n), random_network(rng, n)))
            M = attribute_cost(a, b, 2)
            ref = min(float((M * C).sum()) for C in verts)
            w_err = max(w_err, abs(wasserstein(a, b).objective - ref))
            # tiny instances are quadratic assignment problems with many local optima
            res = gromov_wasserstein(a, b, SolverConfig(restarts=100))
            gw_excess = max(gw_excess, res.objective - min(quad_objective(a.W, b.W, P) for P in permutations(n)))
    g1 = MeasureNetwork([0.5, 0.5], [[0, 1], [1, 0]], [[0, 0], [1, 0]])
    g2 = MeasureNetwork([0.5, 0.5], [[0, 2], [2, 0]], [[0, 1], [1, 1]])
    two = gromov_wasserstein(g1, g2).distance
    elapsed = time.perf_counter() - t0
    checks = [
        ("W=enumeration<=1e-9", w_err <= 1e-9),
        ("GW<=perm+1e-6", gw_excess <= 1e-6),
        ("two-node=sqrt(1/2)", abs(two - math.sqrt(0.5)) <= 1e-9),
    ]
    assert _report(capsys, 4, checks, elapsed, 5.0)


def test_criterion_5_morse_pipeline(capsys):
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = extract_morse_graph(simplify(normalize_field(sine_source(128, 128)), 0.07), 0.07)
    n_manifolds = g.meta["n_manifolds"]
    grid = np.round(np.arange(0, 1.0001, 0.01), 2)
    rng = np.random.Generator(np.random.PCG64(5))
    monotone = True
    fields = random_gaussians(int(rng.integers(2, 6)), 10, rows=128, noise_amp=0.05, seed=5)
    fields += [gen_sine_mixture(128, 128, rng.uniform(0.5, 4, 2), rng.uniform(0.5, 4, 2), float(rng.uniform(0, 0.5)), s) for s in range(10)]
    for f in fields:
        counts = [c for _, c in persistence_graph(normalize_field(f), grid)]
        monotone &= all(b <= a for a, b in zip(counts, counts[1:])) and counts[-1] >= 1
    elapsed = time.perf_counter() - t0
    checks = [("nine-manifolds", n_manifolds == 9), (f"monotone-{len(fields)}", monotone and len(fields) == 20)]
    assert _report(capsys, 5, checks, elapsed, 20.0)


# a target edge is noise-only when its polyline sits, in median, this far from
# every source edge (normalized coordinates)
NOISE_EDGE_DELTA = 0.03


def test_criterion_6_partial_robustness(capsys):
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        src, tgt = sn_pair(noise_amp=0.3)
        A, B = extract(src, 0.07, 0.05), extract(tgt, 0.07, 0.05)
    a, b = normalize_pair(A.network, B.network)
    ms = np.round(np.arange(0.5, 1.0001, 0.05), 2)
    curve, results = m_sweep(a, b, ms, "pfgw")
    elbow = elbow_select(curve)
    coupling = results[elbow.index].coupling
    hollow = color_transfer(a, b, coupling).hollow

    S = np.vstack([e.polyline for e in A.graph.edges])
    median_gap = [float(np.median(cdist(e.polyline, S).min(axis=1))) for e in B.graph.edges]
    noise_edges = {k for k, gap in enumerate(median_gap) if gap > NOISE_EDGE_DELTA}
    parent = B.sampled.meta["parent_edge"]
    on_noise = [j for j, e in enumerate(parent) if e in noise_edges]
    hollow_on_noise = int(hollow[on_noise].sum()) if on_noise else 0

    # degree >= 3 critical nodes of the source and their target counterparts
    d1, d2 = A.sampled.degrees(), B.sampled.degrees()
    js = [i for i, nd in enumerate(A.sampled.nodes) if nd.kind == "critical" and d1[i] >= 3]
    jt = [j for j, nd in enumerate(B.sampled.nodes) if nd.kind == "critical" and d2[j] >= 3]
    gaps = cdist(A.sampled.positions()[js], B.sampled.positions()[jt])
    corr = sorted({jt[k] for k, g in zip(gaps.argmin(axis=1), gaps.min(axis=1)) if g < NOISE_EDGE_DELTA})
    C = coupling.matrix
    argmax_t = [int(np.argmax(C[i])) for i in js if C[i].sum() > 0]
    elapsed = time.perf_counter() - t0
    checks = [
        (f"elbow-m={elbow.m_star}", elbow.clear),
        (f"noise-edges={len(noise_edges)}", len(noise_edges) >= 1),
        (f"hollow-on-noise={hollow_on_noise}", hollow_on_noise >= 1),
        (f"junction-matches={len(corr)}", len(corr) >= 1 and not hollow[corr].any()),
        ("junction-argmax-filled", not hollow[argmax_t].any()),
    ]
    assert _report(capsys, 6, checks, elapsed, math.inf)


def _knn_accuracies(kind, seed, kinds):
    fields, labels = gaussian_collection(kind, seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        nets = [extract(f, 0.07, 0.15, keep_largest=True).network for f in fields]
    train, test = stratified_split(labels, 0.8, seed)
    pairs = [(i, j) for i in test for j in train]
    out = {}
    for k in kinds:
        D = distance_matrix(nets, k, SolverConfig(restarts=1), pairs=pairs)
        out[k] = knn_classify(D, labels, 3, split=(train, test)).accuracy
    return out


def test_criterion_7_classification(capsys):
    t0 = time.perf_counter()
    rot = _knn_accuracies("rotating", 0, ("w", "gw", "fgw"))
    rand = [_knn_accuracies("random", s, ("w", "gw")) for s in range(5)]
    wins = sum(r["gw"] > r["w"] for r in rand)
    elapsed = time.perf_counter() - t0
    acc = " ".join(f"{k}={v:.3f}" for k, v in rot.items())
    seeds = " ".join(f"{r['w']:.3f}/{r['gw']:.3f}" for r in rand)
    checks = [
        (f"rotating {acc}", min(rot.values()) >= 0.95),
        (f"random w/gw {seeds} wins={wins}", wins >= 4),
    ]
    assert _report(capsys, 7, checks, elapsed, 15 * 60.0)


def test_criterion_8_performance(capsys):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        src, tgt = sn_pair()
        small = normalize_pair(extract(src, 0.07, 0.09, keep_largest=True).network, extract(tgt, 0.07, 0.09, keep_largest=True).network)
        large = normalize_pair(extract(src, 0.07, 0.0135, keep_largest=True).network, extract(tgt, 0.07, 0.015, keep_largest=True).network)
    checks, total = [], 0.0
    for kind in ("w", "gw", "fgw", "pw", "pgw", "pfgw"):
        cfg = SolverConfig(m=0.9) if kind.startswith("p") else SolverConfig()
        t = time.perf_counter()
        distance(kind, *small, cfg)
        t = time.perf_counter() - t
        total += t
        checks.append((f"{kind}@{small[0].n}x{small[1].n}={t:.2f}s", t < 5.0))
    t = time.perf_counter()
    gromov_wasserstein(*large)
    t = time.perf_counter() - t
    checks.append((f"gw@{large[0].n}x{large[1].n}={t:.2f}s", t < 60.0))
    sizes_ok = 80 <= small[0].n <= 130 and 500 <= large[0].n <= 700
    checks.append(("sizes", sizes_ok))
    assert _report(capsys, 8, checks, total + t, 65.0)


def _cli_outputs(root):
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.suffix in (".csv", ".json") and p.name != "manifest.json"
    }


def _cli_session(root):
    def run(*argv):
        assert main([str(v) for v in argv]) == 0, argv

    run("generate", "--generator", "sine", "--rows", 48, "--out", root / "a.txt")
    run("generate", "--generator", "sine", "--rows", 48, "--noise-amp", 0.3, "--seed", 1, "--out", root / "b.txt")
    run("generate", "--generator", "random", "--n", 4, "--rows", 32, "--out-dir", root / "coll")
    run("extract", "--input", root / "a.txt", "--out", root / "a.json", "--persistence-csv", root / "a_pers.csv", "--largest-component")
    run("extract", "--input", root / "b.txt", "--out", root / "b.json", "--largest-component")
    pair = (root / "a.json", root / "b.json")
    run("compare", "--kind", "pfgw", "--m", 0.9, *pair, "--out", root / "r.json", "--coupling-csv", root / "C.csv", "--trace-csv", root / "t.csv", "--colors-json", root / "colors.json")
    run("mtune", *pair, "--m-grid", "0.7:1:0.1", "--restarts", 1, "--out-dir", root / "mtune")
    run("batch", "--list", root / "coll" / "labels.csv", "--kinds", "w,gw,fgw", "--spacing", 0.15, "--restarts", 1, "--out-dir", root / "batch", "--manifest", root / "batch" / "manifest.json")
    run("mds", "--matrix", root / "batch" / "gw" / "matrix.csv", "--out", root / "emb.csv")
    run("knn", "--matrix", root / "batch" / "gw" / "matrix.csv", "--labels", root / "coll" / "labels.csv", "--out", root / "knn.json")
    run("baseline", "--list", root / "coll" / "labels.csv", "--out", root / "base.csv")
    run("baseline", "--list", root / "coll" / "labels.csv", "--metric", "euclidean_complex", "--out", root / "base_c.csv")


def test_criterion_9_cli_determinism(capsys, tmp_path, monkeypatch):
    t0 = time.perf_counter()
    runs = []
    for name in ("first", "second"):
        root = tmp_path / name
        root.mkdir()
        # relative paths keep path strings inside the outputs identical
        monkeypatch.chdir(root)
        _cli_session(type(root)("."))
        runs.append(_cli_outputs(root))
    first, second = runs
    differing = sorted(k for k in first if first[k] != second.get(k))
    parsed = all(json.loads(v) is not None for k, v in first.items() if k.endswith(".json"))
    elapsed = time.perf_counter() - t0
    checks = [
        (f"files={len(first)}", len(first) >= 15 and set(first) == set(second)),
        (f"differing={len(differing)}", not differing),
        ("json-valid", parsed),
    ]
    if differing:
        with capsys.disabled():
            print("differing outputs:", differing)
    assert _report(capsys, 9, checks, elapsed, math.inf)
