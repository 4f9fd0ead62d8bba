"""Evaluation protocols for the sampling and condensing measures.

These are the small, repeatable experiments used by the acceptance tests and
the demo scripts: how condensing erodes connectivity, how it keeps edges
inside classes, and how much a sampling measure favors positive vertices.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .graph import DirectedGraph, PointSet, subgraph_mask
from .metrics import edge_positivity, positivity_after_removal
from .summarize import CondenseConfig, condense, sample_mask, vertex_scores


def random_out_graph(n: int, k: int, seed=0) -> DirectedGraph:
    """Every vertex points to ``k`` distinct others drawn uniformly at random."""
    rng = np.random.default_rng(seed)
    picks = np.empty((n, k), dtype=np.int64)
    for v in range(n):
        draw = rng.choice(n - 1, size=k, replace=False)
        picks[v] = np.sort(draw + (draw >= v))
    return DirectedGraph.from_csr(np.arange(n), np.arange(0, n * k + 1, k), picks.ravel())


def connectivity_decay(
    g: DirectedGraph,
    measure: str,
    *,
    iterations: int = 10,
    t: int = 16,
    depth: int = 2,
    removal: float = 0.1,
    seed=0,
) -> list[DirectedGraph]:
    """Condense, then drop a random ``removal`` share of vertices, repeatedly.

    Returns the graph after each iteration. The random removals depend only
    on ``seed`` and the vertex count, so two measures run with the same seed
    see removal sets of the same sizes drawn from the same stream.
    """
    rng = np.random.default_rng(seed)
    cfg = CondenseConfig(t, depth, measure)
    trail = []
    for _ in range(iterations):
        g = condense(g, (), cfg)
        drop = sample_mask(vertex_scores(g, "random", rng), removal)
        g = subgraph_mask(g, ~drop)
        trail.append(g)
    return trail


def edge_positivity_trace(
    g: DirectedGraph,
    truth,
    measure: str,
    *,
    iterations: int = 5,
    t: int = 16,
    depth: int = 2,
    removal: float = 0.1,
    points: PointSet | np.ndarray | None = None,
    seed=0,
) -> list[float]:
    """Edge positivity after each round of random removal plus condensing."""
    rng = np.random.default_rng(seed)
    cfg = CondenseConfig(t, depth, measure, points=points)
    trace = []
    for _ in range(iterations):
        drop = sample_mask(vertex_scores(g, "random", rng), removal)
        g = condense(g, drop, cfg)
        trace.append(edge_positivity(g, truth))
    return trace


def positivity_after_sampling(
    g: DirectedGraph,
    truth,
    measures: Sequence[str] = ("random", "indegree", "mutual"),
    *,
    rate: float = 0.2,
    seeds: Iterable[int] = range(5),
) -> dict[str, list[float]]:
    """Positivity of the survivors of one sampling pass, per measure and seed."""
    seeds = list(seeds)
    out: dict[str, list[float]] = {}
    for measure in measures:
        vals = []
        for seed in seeds:
            drop = sample_mask(vertex_scores(g, measure, seed), rate)
            vals.append(positivity_after_removal(g, truth, g.ids[drop]))
        out[measure] = vals
    return out
