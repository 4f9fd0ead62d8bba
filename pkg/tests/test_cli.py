import json
import subprocess
import sys

import pytest

from sampclust.cli import run
from sampclust.datasets import gaussian_blobs
from sampclust.dataio import load_graph, load_labels, save_graph, save_labels, save_points
from sampclust.graph import DirectedGraph, build_knn_graph


@pytest.fixture
def blobs(tmp_path):
    pts = gaussian_blobs(400, centers=4, dim=3, seed=0)
    path = tmp_path / "pts.csv"
    save_points(pts, path)
    return path, pts


def metrics_of(text):
    lines = text.strip().splitlines()
    assert lines[0] == "metric,value"
    return dict(line.split(",") for line in lines[1:])


def test_eval_identical(tmp_path, capsys):
    save_labels([0, 0, 1, 2], tmp_path / "a.csv")
    assert run(["eval", "--pred", str(tmp_path / "a.csv"), "--truth", str(tmp_path / "a.csv"), "--metric", "ami"]) == 0
    assert capsys.readouterr().out == "metric,value\nami,1.000000\n"


def test_knn_writes_graph_truth_and_manifest(tmp_path, blobs):
    path, pts = blobs
    out = tmp_path / "g.txt"
    code = run(["knn", "--input", str(path), "--label-column", "-1", "--k", "5",
                "--output", str(out), "--truth-output", str(tmp_path / "y.csv")])
    assert code == 0
    assert load_graph(out) == build_knn_graph(pts.points, 5)
    assert load_labels(tmp_path / "y.csv").tolist() == pts.labels.tolist()
    manifest = json.loads((tmp_path / "g.txt.manifest.json").read_text())
    assert manifest["command"] == "knn" and manifest["config"]["k"] == 5
    assert str(path) in manifest["inputs"]
    assert all(v >= 0 for v in manifest["timings_ms"].values())


def _knn(tmp_path, path, k=8):
    g = tmp_path / "g.txt"
    assert run(["knn", "--input", str(path), "--label-column", "-1", "--k", str(k),
                "--output", str(g), "--truth-output", str(tmp_path / "y.csv")]) == 0
    return g, tmp_path / "y.csv"


def test_cluster_is_byte_identical(tmp_path, blobs):
    g, _ = _knn(tmp_path, blobs[0])
    for name in ("a.json", "b.json"):
        assert run(["cluster", "--graph", str(g), "--sample", "random", "--seed", "4",
                    "--output", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["config"]["sampling"] == {"rate": 0.2, "measure": "random", "seed": 4}


def test_staged_chain_matches_full_pipeline(tmp_path, blobs, capsys):
    g, y = _knn(tmp_path, blobs[0])
    p = lambda name: str(tmp_path / name)  # noqa: E731
    steps = [
        ["cluster", "--graph", str(g), "--output", p("d.json")],
        ["label", "--dendro", p("d.json"), "--output", p("leaf.csv")],
        ["smooth", "--labels", p("leaf.csv"), "--graph", str(g), "--output", p("leaf_s.csv")],
        ["prune", "--dendro", p("d.json"), "--labels", p("leaf_s.csv"), "--n", "4", "--output", p("pruned.json")],
        ["label", "--dendro", p("pruned.json"), "--compact", "--output", p("flat.csv")],
        ["smooth", "--labels", p("flat.csv"), "--graph", str(g), "--output", p("final.csv")],
        ["cluster", "--graph", str(g), "--full-pipeline", "--n", "4", "--output", p("d2.json"),
         "--labels-output", p("full.csv")],
    ]
    for argv in steps:
        assert run(argv) == 0, argv
    staged = load_labels(p("final.csv"))
    capsys.readouterr()
    run(["eval", "--pred", p("final.csv"), "--truth", p("full.csv"), "--metric", "ami"])
    assert metrics_of(capsys.readouterr().out)["ami"] == "1.000000"
    assert len(set(staged.tolist())) == 4
    run(["eval", "--pred", p("full.csv"), "--truth", str(y), "--metric", "ami,nmi,nmi_sqrt"])
    scores = metrics_of(capsys.readouterr().out)
    assert set(scores) == {"ami", "nmi", "nmi_sqrt"} and float(scores["ami"]) > 0.9


def test_graphstats(tmp_path, capsys):
    g = DirectedGraph.from_edges(range(3), [(a, b) for a in range(3) for b in range(3) if a != b])
    save_graph(g, tmp_path / "g.txt")
    save_labels([0, 0, 1], tmp_path / "y.csv")
    assert run(["graphstats", "--graph", str(tmp_path / "g.txt"), "--truth", str(tmp_path / "y.csv"),
                "--positivity", "--edge-positivity", "--connectivity"]) == 0
    out = metrics_of(capsys.readouterr().out)
    assert out == {
        "vertices": "3",
        "edges": "6",
        "vertex_positivity": "0.000000",
        "edge_positivity": "0.333333",
        "connectivity": "2.000000",
    }


def test_bench_table(tmp_path):
    out = tmp_path / "bench.csv"
    assert run(["bench", "--sizes", "300,600", "--k", "6", "--output", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "n,knn_seconds,cluster_seconds,ratio,leaves"
    assert [r.split(",")[0] for r in rows[1:]] == ["300", "600"]
    assert rows[1].split(",")[3] == "" and float(rows[2].split(",")[3]) > 0


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["knn", "--input", "x.csv"],
        ["knn", "--input", "x.csv", "--output", "g.txt", "--k", "0"],
        ["cluster", "--graph", "g.txt", "--output", "d.json", "--rate", "1.5"],
        ["eval", "--pred", "a", "--truth", "b", "--metric", "f1"],
        ["label", "--dendro", "d.json", "--output", "l.csv", "--bogus"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_runtime_errors_exit_1(tmp_path, capsys):
    assert run(["label", "--dendro", str(tmp_path / "missing.json"), "--output", str(tmp_path / "l.csv")]) == 1
    (tmp_path / "bad.txt").write_text("0: 1\n")
    assert run(["cluster", "--graph", str(tmp_path / "bad.txt"), "--output", str(tmp_path / "d.json")]) == 1
    err = capsys.readouterr().err
    assert "bad.txt:1" in err
    assert not (tmp_path / "d.json").exists()


def test_module_entry_point(tmp_path):
    save_labels([1, 0], tmp_path / "a.csv")
    proc = subprocess.run(
        [sys.executable, "-m", "sampclust", "eval", "--pred", str(tmp_path / "a.csv"),
         "--truth", str(tmp_path / "a.csv")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "metric,value\nami,1.000000\nnmi,1.000000\n"
    proc = subprocess.run([sys.executable, "-m", "sampclust", "knn"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and "required" in proc.stderr


def test_help_lists_defaults(capsys):
    assert run(["cluster", "--help"]) == 0
    text = capsys.readouterr().out
    for flag in ("--rate", "--t", "--depth", "--precondense", "--seed"):
        assert flag in text
    assert "(default: 0.2)" in text and "(default: jaccard)" in text
    assert "seed for random sampling (default: 0)" in text
