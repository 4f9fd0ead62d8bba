import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import digraphs
from test_postprocess import dendrograms
from sampclust.cluster import Branch, Leaf
from sampclust.dataio import (
    RunManifest,
    format_metrics,
    load_dendrogram,
    load_graph,
    load_labels,
    load_points,
    manifest_path,
    save_dendrogram,
    save_graph,
    save_labels,
    save_points,
)
from sampclust.errors import ParseError
from sampclust.graph import DirectedGraph, PointSet

tmp_settings = settings(suppress_health_check=[HealthCheck.function_scoped_fixture])


def write(path, text):
    path.write_text(text)
    return path


class TestPoints:
    def test_plain(self, tmp_path):
        p = load_points(write(tmp_path / "a.csv", "0,0\n1,1\n3,9\n"))
        assert p.points.tolist() == [[0, 0], [1, 1], [3, 9]] and p.labels is None

    def test_label_column(self, tmp_path):
        p = load_points(write(tmp_path / "a.csv", "0,0\n1,1\n3,9\n"), label_column=1)
        assert p.points.tolist() == [[0], [1], [3]]
        assert p.labels.tolist() == [0, 1, 9]

    def test_negative_label_column(self, tmp_path):
        p = load_points(write(tmp_path / "a.csv", "0,5,a\n1,6,b\n"), label_column=-1)
        assert p.points.shape == (2, 2) and p.labels.tolist() == ["a", "b"]

    def test_header_skipped(self, tmp_path):
        p = load_points(write(tmp_path / "a.csv", "x,y\n0,0\n1,1\n"))
        assert p.points.shape == (2, 2)

    @pytest.mark.parametrize(
        "text, column, line",
        [
            ("0,0\n1\n", None, 2),
            ("x,y\n0,0\n1,b\n", None, 3),
            ("0,0\n", 2, 1),
            ("0,0\n1,inf\n", None, 2),
        ],
    )
    def test_errors_carry_line(self, tmp_path, text, column, line):
        with pytest.raises(ParseError) as err:
            load_points(write(tmp_path / "a.csv", text), label_column=column)
        assert err.value.line == line
        assert f":{line}:" in str(err.value)

    @tmp_settings
    @given(
        st.integers(1, 20).flatmap(
            lambda n: st.lists(
                st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=3, max_size=3), min_size=n, max_size=n
            )
        ),
        st.booleans(),
    )
    def test_round_trip(self, tmp_path, rows, labeled):
        x = np.array(rows)
        labels = np.arange(len(rows)) % 3 if labeled else None
        save_points(PointSet(x, labels), tmp_path / "p.csv")
        back = load_points(tmp_path / "p.csv", label_column=-1 if labeled else None)
        assert np.array_equal(back.points, x)
        if labeled:
            assert back.labels.tolist() == labels.tolist()


class TestGraph:
    def test_empty(self, tmp_path):
        save_graph(DirectedGraph({}), tmp_path / "g.txt")
        assert (tmp_path / "g.txt").read_text() == ""
        assert load_graph(tmp_path / "g.txt").n_vertices == 0

    def test_edgeless_line(self, tmp_path):
        g = DirectedGraph({3: [5], 5: []})
        save_graph(g, tmp_path / "g.txt")
        assert (tmp_path / "g.txt").read_text() == "3: 5\n5:\n"
        assert load_graph(tmp_path / "g.txt").out(5) == ()

    @pytest.mark.parametrize(
        "text, line",
        [
            ("0: 1\n1 0\n", 2),
            ("0: 1\n1: x\n", 2),
            ("0: 1\n1: 0\n0:\n", 3),
            ("1: 0\n0: 1\n", 2),
            ("0: 2 1\n1:\n2:\n", 1),
            ("0: 0\n", 1),
            ("0: 1\n1: 7\n", 2),
            ("0: -1\n", 1),
        ],
    )
    def test_errors_carry_line(self, tmp_path, text, line):
        with pytest.raises(ParseError) as err:
            load_graph(write(tmp_path / "g.txt", text))
        assert err.value.line == line

    @tmp_settings
    @given(digraphs(id_gap=True))
    def test_round_trip(self, tmp_path, g):
        save_graph(g, tmp_path / "g.txt")
        assert load_graph(tmp_path / "g.txt") == g

    def test_pendigits_round_trip(self, tmp_path, pendigits_graph):
        save_graph(pendigits_graph, tmp_path / "g.txt")
        back = load_graph(tmp_path / "g.txt")
        assert back == pendigits_graph
        assert np.array_equal(back.indices, pendigits_graph.indices)


class TestDendrogram:
    def test_single_leaf(self, tmp_path):
        save_dendrogram(Leaf([0, 1, 2]), tmp_path / "d.json")
        assert load_dendrogram(tmp_path / "d.json") == Leaf([0, 1, 2])

    def test_nested_non_binary_with_config(self, tmp_path):
        d = Branch([Leaf([4]), Branch([Leaf([0, 1]), Leaf([2]), Leaf([5])]), Leaf([3])])
        save_dendrogram(d, tmp_path / "d.json", {"seed": 3})
        back, cfg = load_dendrogram(tmp_path / "d.json", with_config=True)
        assert back == d and cfg == {"seed": 3}

    def test_layout(self, tmp_path):
        save_dendrogram(Branch([Leaf([1]), Leaf([0])]), tmp_path / "d.json")
        doc = json.loads((tmp_path / "d.json").read_text())
        assert doc["root"] == {"children": [{"items": [1]}, {"items": [0]}]}

    @pytest.mark.parametrize(
        "root",
        [
            {"children": [{"items": [0, 1]}, {"items": [1]}]},
            {"items": [2, 1]},
            {"items": [0.5]},
            {"children": []},
            {"leaf": [0]},
        ],
    )
    def test_rejects_invalid(self, tmp_path, root):
        write(tmp_path / "d.json", json.dumps({"root": root}))
        with pytest.raises(ParseError):
            load_dendrogram(tmp_path / "d.json")

    def test_rejects_bad_json(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_dendrogram(write(tmp_path / "d.json", '{"root":\n  {"items": [0,]}}'))
        assert err.value.line == 2

    @tmp_settings
    @given(dendrograms())
    def test_round_trip(self, tmp_path, d):
        save_dendrogram(d, tmp_path / "d.json")
        assert load_dendrogram(tmp_path / "d.json") == d


class TestLabels:
    @tmp_settings
    @given(st.lists(st.integers(-5, 50), max_size=30))
    def test_round_trip(self, tmp_path, labels):
        save_labels(labels, tmp_path / "l.csv")
        assert load_labels(tmp_path / "l.csv").tolist() == labels

    @pytest.mark.parametrize(
        "text, line",
        [("idx,label\n0,1\n", 1), ("index,label\n0,1\n2,1\n", 3), ("index,label\n0,1,2\n", 2)],
    )
    def test_errors(self, tmp_path, text, line):
        with pytest.raises(ParseError) as err:
            load_labels(write(tmp_path / "l.csv", text))
        assert err.value.line == line


def test_metric_report():
    assert format_metrics([("ami", 1.0), ("vertices", 12)]) == "metric,value\nami,1.000000\nvertices,12\n"


def test_manifest_round_trip(tmp_path):
    src = write(tmp_path / "in.txt", "hello")
    m = RunManifest("knn", {"k": 16})
    m.add_input(src)
    m.record("knn", 0.25)
    m.outputs.append("out.txt")
    path = manifest_path(tmp_path / "out.txt")
    assert path.name == "out.txt.manifest.json"
    m.write(path)
    back = RunManifest.read(path)
    assert back == m
    assert back.timings_ms == {"knn": 250.0}
    assert len(back.inputs[str(src)]) == 64
