import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import digraphs
from sampclust.errors import ConfigurationError, InvalidParameter
from sampclust.experiments import edge_positivity_trace
from sampclust.graph import DirectedGraph, build_knn_graph, induced_subgraph
from sampclust.summarize import (
    CondenseConfig,
    SamplingConfig,
    condense,
    condense_reference,
    jaccard_dissimilarity,
    removal_count,
    sample,
    score_vertices,
)


def adj(g):
    return {v: list(ns) for v, ns in g.adjacency.items()}


class TestScores:
    def test_indegree(self):
        g = DirectedGraph.from_edges(range(4), [(0, 1), (2, 1), (3, 1), (1, 0)])
        assert score_vertices(g, "indegree") == {0: 1, 1: 3, 2: 0, 3: 0}

    def test_mutual(self):
        g = DirectedGraph.from_edges(range(3), [(0, 1), (1, 0), (0, 2)])
        assert score_vertices(g, "mutual") == {0: 1, 1: 1, 2: 0}

    def test_complete_graph_indegree(self):
        g = DirectedGraph({v: [u for u in range(4) if u != v] for v in range(4)})
        assert set(score_vertices(g, "indegree").values()) == {3}

    def test_random_is_seeded(self):
        g = DirectedGraph({v: [] for v in range(20)})
        assert score_vertices(g, "random", 5) == score_vertices(g, "random", 5)
        assert score_vertices(g, "random", 5) != score_vertices(g, "random", 6)

    @given(digraphs(id_gap=True))
    def test_mutual_counts_reciprocated_edges(self, g):
        edges = set(g.edges())
        expected = {v: sum((u, v) in edges for u in g.out(v)) for v in g.vertices}
        assert score_vertices(g, "mutual") == expected

    def test_unknown_measure(self):
        with pytest.raises(InvalidParameter):
            score_vertices(DirectedGraph({0: []}), "degree")


class TestSample:
    G4 = DirectedGraph({v: [] for v in range(4)})

    def test_threshold(self):
        assert sample(self.G4, {0: 5, 1: 3, 2: 1, 3: 4}, 0.25) == {2}

    def test_all_tied(self):
        assert sample(self.G4, {v: 1.0 for v in range(4)}, 0.25) == {0, 1, 2, 3}

    def test_nothing_when_count_rounds_to_zero(self):
        assert sample(self.G4, {0: 5, 1: 3, 2: 1, 3: 4}, 0.2) == frozenset()

    def test_count_guard(self):
        assert removal_count(100, 0.29) == 29
        assert removal_count(3, 0.2) == 0

    @given(
        st.lists(st.integers(0, 5), min_size=1, max_size=30),
        st.floats(0.01, 0.99),
        st.floats(0.01, 0.99),
    )
    def test_size_and_monotonicity(self, values, r1, r2):
        g = DirectedGraph({v: [] for v in range(len(values))})
        scores = dict(enumerate(values))
        lo, hi = sorted((r1, r2))
        small, big = sample(g, scores, lo), sample(g, scores, hi)
        n = removal_count(len(values), lo)
        assert len(small) >= n
        if n == 0:
            assert small == frozenset()
        assert small <= big

    def test_config_validation(self):
        with pytest.raises(InvalidParameter):
            SamplingConfig(rate=1.0)
        with pytest.raises(InvalidParameter):
            SamplingConfig(measure="pagerank")


class TestCondense:
    def test_chain(self):
        g = DirectedGraph.from_edges(range(4), [(0, 1), (1, 2), (2, 3)])
        h = condense(g, (), CondenseConfig(t=2, depth=3))
        assert adj(h) == {0: [1, 2], 1: [2, 3], 2: [3], 3: []}

    @pytest.mark.parametrize("k", [3, 8])
    def test_visit_order_keeps_regular_graph(self, k):
        x = np.random.default_rng(k).normal(size=(60, 3))
        g = build_knn_graph(x, k)
        assert condense(g, (), CondenseConfig(t=k, depth=1)) == g

    def test_isolated_survivor(self):
        g = DirectedGraph({0: [1], 1: [0]})
        assert adj(condense(g, {1}, CondenseConfig(t=4))) == {0: []}

    def test_depth_guard_collects_whole_levels(self):
        # star: depth 1 holds 5 vertices, more than t
        g = DirectedGraph.from_edges(range(7), [(0, u) for u in range(1, 6)] + [(1, 6)])
        h = condense(g, (), CondenseConfig(t=2, depth=1, measure="jaccard"))
        # all 5 depth-1 candidates tie on jaccard except 1, which shares nothing extra
        assert len(h.out(0)) == 2

    def test_errors(self):
        g = DirectedGraph({0: [1], 1: [0]})
        with pytest.raises(InvalidParameter):
            condense(g, {0, 1}, CondenseConfig())
        with pytest.raises(InvalidParameter):
            condense(g, {5}, CondenseConfig())
        with pytest.raises(ConfigurationError):
            CondenseConfig(measure="euclidean")
        with pytest.raises(ConfigurationError):
            condense(g, (), CondenseConfig(measure="euclidean", points=np.zeros((1, 2))))
        with pytest.raises(InvalidParameter):
            CondenseConfig(t=0)
        with pytest.raises(InvalidParameter):
            CondenseConfig(measure="cosine")

    def test_measure_aliases(self):
        assert CondenseConfig(measure="visit_order").measure == "visit"
        assert CondenseConfig(measure="shared").measure == "jaccard"

    @given(
        digraphs(max_n=14, id_gap=True),
        st.data(),
        st.sampled_from(["visit", "jaccard", "euclidean"]),
        st.integers(1, 6),
        st.integers(0, 4),
    )
    def test_matches_reference(self, g, data, measure, t, depth):
        if g.n_vertices == 0:
            return
        removed = data.draw(st.sets(st.sampled_from(g.vertices), max_size=g.n_vertices - 1))
        rng = np.random.default_rng(g.n_vertices)
        # coarse coordinates so that distance ties occur
        pts = rng.integers(0, 3, size=(max(g.vertices) + 1, 2)).astype(float)
        cfg = CondenseConfig(t, depth, measure, points=pts)
        assert condense(g, removed, cfg) == condense_reference(g, removed, cfg)

    @pytest.mark.parametrize("measure", ["visit", "jaccard", "euclidean"])
    @pytest.mark.parametrize("seed", range(3))
    def test_matches_reference_on_knn_graphs(self, measure, seed):
        rng = np.random.default_rng(seed)
        x = rng.integers(0, 6, size=(300, 3)).astype(float)
        g = build_knn_graph(x, 8)
        removed = set(rng.choice(300, 60, replace=False).tolist())
        for t, depth in [(8, 2), (5, 1), (12, 2), (3, 0)]:
            cfg = CondenseConfig(t, depth, measure, points=x)
            assert condense(g, removed, cfg) == condense_reference(g, removed, cfg)

    @given(digraphs(max_n=14), st.integers(1, 5), st.integers(0, 3), st.sampled_from(["visit", "jaccard"]))
    def test_degree_bound(self, g, t, depth, measure):
        if g.n_vertices == 0:
            return
        h = condense(g, (), CondenseConfig(t, depth, measure))
        assert h.vertices == g.vertices
        for v in g.vertices:
            reach = _reachable_count(g, v)
            assert len(h.out(v)) == min(t, reach)
            assert v not in h.out(v)


def _reachable_count(g, v):
    seen, stack = {v}, [v]
    while stack:
        for u in g.out(stack.pop()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) - 1


class TestJaccard:
    @given(digraphs(max_n=10), st.data())
    def test_symmetric_and_zero_iff_equal(self, g, data):
        if g.n_vertices < 2:
            return
        v = data.draw(st.sampled_from(g.vertices))
        u = data.draw(st.sampled_from(g.vertices))
        d = jaccard_dissimilarity(g, v, u)
        assert d == jaccard_dissimilarity(g, u, v)
        assert (d == 0) == (set(g.out(v)) | {v} == set(g.out(u)) | {u})
        assert 0 <= d <= 1

    def test_neighborhoods_exclude_removed(self):
        # with 2 present the closed neighborhoods {0,1,2} and {1,2,3} share two of four
        g = DirectedGraph.from_edges(range(4), [(0, 2), (1, 2), (0, 1), (1, 3), (3, 0)])
        assert jaccard_dissimilarity(g, 0, 1) == pytest.approx(1 - 2 / 4)
        h = induced_subgraph(g, {0, 1, 3})
        assert jaccard_dissimilarity(h, 0, 1) == pytest.approx(1 - 1 / 3)


def test_edge_positivity_ordering(pendigits, pendigits_graph):
    """Graph-based condensing keeps at least as many within-class edges as
    Euclidean condensing on Pendigits (checked for c_s; c_v is tested below)."""
    y = pendigits.labels
    ep = {
        m: edge_positivity_trace(pendigits_graph, y, m, points=pendigits, seed=0)[-1]
        for m in ("jaccard", "euclidean")
    }
    assert ep["jaccard"] >= ep["euclidean"]


@pytest.mark.xfail(strict=True, reason="on 16-D Pendigits, Euclidean ranking beats BFS order by ~0.003")
def test_edge_positivity_visit_beats_euclidean(pendigits, pendigits_graph):
    y = pendigits.labels
    ep = {
        m: edge_positivity_trace(pendigits_graph, y, m, points=pendigits, seed=0)[-1]
        for m in ("visit", "euclidean")
    }
    assert ep["visit"] >= ep["euclidean"]
