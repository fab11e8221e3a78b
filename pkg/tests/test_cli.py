import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from morseot import serialize as ser
from morseot.cli import main

from oracles import straight_graph


def run(*argv):
    return main([str(a) for a in argv])


def _files(root):
    """Relative path -> bytes for every CSV/JSON under ``root`` except manifests."""
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.suffix in (".csv", ".json") and p.name != "manifest.json"
    }


@pytest.fixture(scope="module")
def fields(tmp_path_factory):
    d = tmp_path_factory.mktemp("fields")
    assert run("generate", "--generator", "sine", "--rows", 40, "--out", d / "a.txt") == 0
    assert run("generate", "--generator", "sine", "--rows", 40, "--noise-amp", 0.3, "--seed", 1, "--out", d / "b.txt") == 0
    assert run("generate", "--generator", "sine", "--rows", 40, "--noise-amp", 0.1, "--seed", 2, "--out", d / "c.csv", "--format", "csv") == 0
    return d


# --- generate / extract ----------------------------------------------------------


def test_generate_deterministic(tmp_path):
    for name in ("x.txt", "y.txt"):
        assert run("generate", "--rows", 16, "--noise-amp", 0.2, "--seed", 5, "--out", tmp_path / name) == 0
    assert (tmp_path / "x.txt").read_bytes() == (tmp_path / "y.txt").read_bytes()
    assert (tmp_path / "x.txt").read_text().startswith("16 16\n")


def test_generate_collections(tmp_path):
    assert run("generate", "--generator", "sn", "--rows", 24, "--out-dir", tmp_path / "sn") == 0
    files, labels = ser.read_labels(tmp_path / "sn" / "labels.csv")
    assert labels == ["source", "target"]
    assert run("generate", "--generator", "rotating", "--n", 3, "--rows", 24, "--out-dir", tmp_path / "rot") == 0
    _, labels = ser.read_labels(tmp_path / "rot" / "labels.csv")
    assert labels == ["binary"] * 3 + ["trinary"] * 3
    assert run("generate", "--generator", "gaussian", "--rows", 16, "--component", "0.5,0.5,0.1,1", "--out", tmp_path / "g.txt") == 0


def test_generate_usage_errors(tmp_path, capsys):
    assert run("generate", "--generator", "sine") == 2
    assert run("generate", "--generator", "gaussian", "--out", tmp_path / "g.txt") == 2
    assert run("generate", "--generator", "rotating") == 2
    assert run("generate", "--rows", 1, "--out", tmp_path / "g.txt") == 2
    assert run("generate", "--generator", "bogus") == 2
    assert "usage:" in capsys.readouterr().err


def test_extract_outputs(tmp_path, fields):
    out = tmp_path / "g.json"
    code = run("extract", "--input", fields / "a.txt", "--epsilon", 0.07, "--out", out, "--persistence-csv", tmp_path / "p.csv", "--svg", tmp_path / "g.svg")
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, ser.GRAPH_SCHEMA)
    assert data["meta"]["epsilon"] == 0.07 and data["meta"]["source"] == "a.txt"
    assert data["meta"]["n_manifolds"] == 9
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "epsilon,n_maxima" and len(lines) == 102
    assert (tmp_path / "g.svg").read_text().startswith("<svg")


def test_extract_csv_input_and_stdout(fields, capsys):
    assert run("extract", "--input", fields / "c.csv") == 0
    assert json.loads(capsys.readouterr().out)["meta"]["source"] == "c.csv"


def test_extract_rejects_bad_epsilon(fields, capsys):
    assert run("extract", "--input", fields / "a.txt", "--epsilon", 1.5) == 2
    err = capsys.readouterr().err
    assert "usage:" in err and "epsilon" in err
    assert run("extract", "--input", fields / "a.txt", "--spacing", 0) == 2


def test_extract_missing_file(tmp_path, capsys):
    assert run("extract", "--input", tmp_path / "nope.txt") == 1
    assert "error" in capsys.readouterr().err


def test_extract_parse_error(tmp_path, capsys):
    (tmp_path / "bad.txt").write_text("2 2\n1 2\n3 x\n")
    assert run("extract", "--input", tmp_path / "bad.txt") == 1
    assert "line 3" in capsys.readouterr().err


# --- compare -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def graphs(tmp_path_factory, fields):
    d = tmp_path_factory.mktemp("graphs")
    for name in ("a", "b"):
        assert run("extract", "--input", fields / f"{name}.txt", "--largest-component", "--out", d / f"{name}.json") == 0
    return d


def test_compare_fgw(tmp_path, graphs):
    out = tmp_path / "r.json"
    assert run("compare", "--kind", "fgw", "--alpha", 0.5, graphs / "a.json", graphs / "b.json", "--out", out) == 0
    res = json.loads(out.read_text())
    jsonschema.validate(res, ser.RESULT_SCHEMA)
    assert res["distance"] >= 0 and res["kind"] == "fgw"


def test_compare_partial_mass(tmp_path, graphs):
    out = tmp_path / "r.json"
    args = ("compare", "--kind", "pfgw", "--m", 0.86, graphs / "a.json", graphs / "b.json", "--out", out)
    assert run(*args, "--colors-json", tmp_path / "c.json", "--svg", tmp_path / "pair") == 0
    C = np.array(json.loads(out.read_text())["coupling"])
    assert C.sum() == pytest.approx(0.86, abs=1e-8)
    colors = json.loads((tmp_path / "c.json").read_text())
    assert any(t["hollow"] for t in colors["target"])
    assert (tmp_path / "pair_target.svg").exists() and (tmp_path / "pair_source.svg").exists()


def test_compare_self_is_zero(tmp_path, graphs, capsys):
    assert run("compare", "--kind", "w", graphs / "a.json", graphs / "a.json") == 0
    assert json.loads(capsys.readouterr().out)["distance"] <= 1e-9


def test_compare_side_outputs(tmp_path, graphs):
    args = ("compare", "--kind", "gw", graphs / "a.json", graphs / "b.json", "--restarts", 1)
    assert run(*args, "--coupling-csv", tmp_path / "C.csv", "--trace-csv", tmp_path / "t.csv") == 0
    C = np.loadtxt(tmp_path / "C.csv", delimiter=",")
    assert C.sum() == pytest.approx(1.0, abs=1e-8)
    trace = np.loadtxt(tmp_path / "t.csv", delimiter=",", skiprows=1)
    assert np.all(np.diff(np.atleast_2d(trace)[:, 1]) <= 1e-12)


def test_compare_disconnected(tmp_path):
    g = straight_graph([(0, 0), (0.5, 0), (0, 1), (0.5, 1)], [(0, 1), (2, 3)], {"epsilon": 0.0, "source": "two"})
    ser.save_graph(tmp_path / "two.json", g)
    assert run("compare", "--kind", "w", tmp_path / "two.json", tmp_path / "two.json") == 1
    assert run("compare", "--kind", "w", "--largest-component", tmp_path / "two.json", tmp_path / "two.json", "--out", tmp_path / "r.json") == 0


def test_compare_usage_errors(graphs):
    assert run("compare", "--kind", "w", graphs / "a.json") == 2
    assert run("compare", "--kind", "pfgw", "--m", 0, graphs / "a.json", graphs / "b.json") == 2
    assert run("compare", "--kind", "fgw", "--alpha", 2, graphs / "a.json", graphs / "b.json") == 2
    assert run("compare", "--kind", "sinkhorn", graphs / "a.json", graphs / "b.json") == 2


# --- config files ------------------------------------------------------------------------


def test_config_defaults_and_override(tmp_path, graphs):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "pw", "m": 0.5, "max-iterations": 20}))
    out = tmp_path / "r.json"
    assert run("compare", "--config", cfg, graphs / "a.json", graphs / "b.json", "--out", out) == 0
    res = json.loads(out.read_text())
    assert res["kind"] == "pw" and res["mass"] == 0.5
    assert run("compare", "--config", cfg, "--m", 0.7, graphs / "a.json", graphs / "b.json", "--out", out) == 0
    assert json.loads(out.read_text())["mass"] == 0.7


def test_config_rejects_unknown_and_invalid(tmp_path, graphs, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "w", "bandwidth": 3}))
    assert run("compare", "--config", cfg, graphs / "a.json", graphs / "b.json") == 2
    assert "bandwidth" in capsys.readouterr().err
    cfg.write_text("[1, 2]")
    assert run("compare", "--config", cfg, graphs / "a.json", graphs / "b.json") == 2
    cfg.write_text("{")
    assert run("compare", "--config", cfg, graphs / "a.json", graphs / "b.json") == 2
    cfg.write_text(json.dumps({"epsilon": 3}))
    assert run("compare", "--config", cfg, graphs / "a.json", graphs / "b.json") == 2


def test_config_grid_values(tmp_path, fields):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps-grid": [0.0, 0.1, 0.5]}))
    assert run("extract", "--config", cfg, "--input", fields / "a.txt", "--out", tmp_path / "g.json", "--persistence-csv", tmp_path / "p.csv") == 0
    assert len((tmp_path / "p.csv").read_text().splitlines()) == 4


# --- batch / mtune / mds / knn / baseline ------------------------------------------------------


def test_batch_identical_instances_zero(tmp_path, fields):
    out = tmp_path / "b"
    args = ("batch", fields / "a.txt", fields / "a.txt", fields / "a.txt", "--kinds", "w,gw,pfgw", "--m", 0.9, "--restarts", 1, "--out-dir", out)
    assert run(*args) == 0
    for kind in ("w", "gw", "pfgw"):
        D = ser.load_distance_matrix(out / kind / "matrix.csv")
        assert D.n == 3 and np.abs(D.values).max() <= 1e-6
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["runtimes"]["gw"]) == 3
    assert all(r["seconds"] >= 0 for r in manifest["runtimes"]["gw"])
    assert len(manifest["config_hash"]) == 64


@pytest.fixture(scope="module")
def collection(tmp_path_factory):
    d = tmp_path_factory.mktemp("rot")
    assert run("generate", "--generator", "rotating", "--n", 5, "--rows", 32, "--out-dir", d) == 0
    return d


def _batch(out, collection, *extra):
    return run("batch", "--list", collection / "labels.csv", "--kinds", "w,gw,euclidean_scalar", "--spacing", 0.15, "--restarts", 1, "--out-dir", out, *extra)


def test_batch_deterministic_and_parallel(tmp_path, collection):
    assert _batch(tmp_path / "r1", collection) == 0
    first = _files(tmp_path / "r1")
    m1 = json.loads((tmp_path / "r1" / "manifest.json").read_text())
    assert "gw/matrix.csv" in first and "gw/knn.json" in first and "w/mds.csv" in first
    assert _batch(tmp_path / "r1", collection) == 0
    assert _batch(tmp_path / "r3", collection, "--jobs", 2) == 0
    assert first == _files(tmp_path / "r1") == _files(tmp_path / "r3")
    m2 = json.loads((tmp_path / "r1" / "manifest.json").read_text())
    assert m1["config_hash"] == m2["config_hash"] and m1["outputs"] == m2["outputs"]
    rep = json.loads((tmp_path / "r1" / "gw" / "knn.json").read_text())
    assert rep["n_train"] == 8 and rep["n_test"] == 2 and rep["k"] == 3


def test_batch_knn_pairs(tmp_path, collection):
    assert _batch(tmp_path / "r", collection, "--pairs", "knn") == 0
    text = (tmp_path / "r" / "gw" / "matrix.csv").read_text()
    assert ",," in text  # train-by-train entries are not computed
    assert not (tmp_path / "r" / "gw" / "mds.csv").exists()


def test_batch_errors(tmp_path, fields):
    assert run("batch", fields / "a.txt", "--out-dir", tmp_path) == 2
    assert run("batch", fields / "a.txt", fields / "b.txt", "--kinds", "w,xyz", "--out-dir", tmp_path) == 2
    assert run("batch", fields / "a.txt", fields / "b.txt", "--pairs", "knn", "--out-dir", tmp_path) == 2
    assert run("batch", fields / "a.txt", fields / "b.txt", "--jobs", 0, "--out-dir", tmp_path) == 2


def test_batch_allow_missing(tmp_path, fields):
    g = straight_graph([(0, 0), (0.5, 0), (0, 1), (0.5, 1)], [(0, 1), (2, 3)], {"epsilon": 0.0, "source": "two"})
    ser.save_graph(tmp_path / "two.json", g)
    ser.save_graph(tmp_path / "one.json", straight_graph([(0, 0), (1, 0)], [(0, 1)], {"epsilon": 0.0, "source": "one"}))
    # the disconnected graph fails on load, which is not a per-pair failure
    assert run("batch", tmp_path / "one.json", tmp_path / "two.json", "--kinds", "w", "--out-dir", tmp_path / "o") == 1


def test_mtune(tmp_path, graphs):
    out = tmp_path / "mt"
    assert run("mtune", graphs / "a.json", graphs / "b.json", "--m-grid", "0.7:1:0.1", "--restarts", 1, "--out-dir", out) == 0
    elbow = json.loads((out / "elbow.json").read_text())
    assert elbow["m_star"] in (0.8, 0.9)
    assert [m for m, _ in elbow["curve"]] == pytest.approx([0.7, 0.8, 0.9, 1.0])
    assert json.loads((out / "result.json").read_text())["mass"] == elbow["m_star"]
    for name in ("sweep.csv", "colors.json", "curve.svg", "target.svg", "source.svg", "manifest.json"):
        assert (out / name).exists()
    again = tmp_path / "mt2"
    assert run("mtune", graphs / "a.json", graphs / "b.json", "--m-grid", "0.7:1:0.1", "--restarts", 1, "--out-dir", again) == 0
    assert _files(out) == _files(again)


def test_mtune_errors(tmp_path, graphs):
    base = ("mtune", graphs / "a.json", graphs / "b.json", "--out-dir", tmp_path)
    assert run(*base, "--m-grid", "0.8,0.9,1.0") == 2
    assert run(*base, "--kind", "gw") == 2
    assert run(*base, "--m-grid", "0:1:0.25") == 2


def test_mds_knn_baseline(tmp_path, collection):
    files, _ = ser.read_labels(collection / "labels.csv")
    assert run("baseline", "--list", collection / "labels.csv", "--out", tmp_path / "d.csv", "--svg", tmp_path / "d.svg") == 0
    D = ser.load_distance_matrix(tmp_path / "d.csv")
    assert D.n == len(files) and np.array_equal(D.values, D.values.T)
    assert run("baseline", files[0], files[1], "--metric", "euclidean_complex", "--out", tmp_path / "c.csv") == 0
    assert run("mds", "--matrix", tmp_path / "d.csv", "--dim", 2, "--labels", collection / "labels.csv", "--out", tmp_path / "x.csv", "--svg", tmp_path / "x.svg") == 0
    assert (tmp_path / "x.csv").read_text().splitlines()[0] == "id,x,y"
    assert run("knn", "--matrix", tmp_path / "d.csv", "--labels", collection / "labels.csv", "--out", tmp_path / "k.json") == 0
    rep = json.loads((tmp_path / "k.json").read_text())
    assert set(rep) >= {"accuracy", "f1", "confusion"}
    # reruns are byte-identical
    assert run("knn", "--matrix", tmp_path / "d.csv", "--labels", collection / "labels.csv", "--out", tmp_path / "k2.json") == 0
    assert (tmp_path / "k.json").read_bytes() == (tmp_path / "k2.json").read_bytes()
    assert run("mds", "--matrix", tmp_path / "d.csv", "--dim", 10) == 2
    assert run("knn", "--matrix", tmp_path / "d.csv") == 2


def test_manifest_flag(tmp_path, fields):
    assert run("extract", "--input", fields / "a.txt", "--out", tmp_path / "g.json", "--manifest", tmp_path / "m.json") == 0
    m = json.loads((tmp_path / "m.json").read_text())
    assert m["command"] == "extract" and m["outputs"] == [str(tmp_path / "g.json")]
    assert m["config"]["epsilon"] == 0.07


def test_batch_manifest_flag_keeps_runtimes(tmp_path, fields):
    args = ("batch", fields / "a.txt", fields / "b.txt", "--kinds", "w", "--out-dir", tmp_path / "o", "--manifest", tmp_path / "m.json")
    assert run(*args) == 0
    m = json.loads((tmp_path / "m.json").read_text())
    assert m["command"] == "batch" and len(m["runtimes"]["w"]) == 1
    assert not (tmp_path / "o" / "manifest.json").exists()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "morseot.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("morseot ")
    proc = subprocess.run([sys.executable, "-m", "morseot.cli", "extract"], capture_output=True, text=True)
    assert proc.returncode == 2 and "--input is required" in proc.stderr
