"""End-to-end runs with the default settings of the method."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterConfig, ClusterTrace, Dendrogram, cluster, flatten, from_labels
from .errors import InvalidParameter
from .graph import DirectedGraph, PointSet, build_knn_graph
from .postprocess import PruneConfig, compact, hard_prune, smooth, soft_prune


@dataclass
class PipelineResult:
    labels: np.ndarray
    dendrogram: Dendrogram
    pruned: Dendrogram
    graph: DirectedGraph
    trace: ClusterTrace = field(repr=False)


def partition(
    d: Dendrogram,
    g: DirectedGraph,
    n_clusters: int,
    *,
    prune: str = "soft",
    alpha: float = 0.8,
    passes: int = 16,
) -> tuple[np.ndarray, Dendrogram]:
    """Smooth leaf labels, prune to ``n_clusters``, smooth again."""
    n = g.n_vertices
    labels = smooth(flatten(d, n), g, passes)
    refilled = from_labels(d, labels)
    if prune == "soft":
        pruned = soft_prune(refilled, n_clusters)
    elif prune == "hard":
        pruned = hard_prune(refilled, PruneConfig(n_clusters, alpha))
    else:
        raise InvalidParameter(f"prune mode must be 'soft' or 'hard', got {prune!r}")
    labels = smooth(flatten(pruned, n), g, passes)
    return compact(labels), pruned


def sampling_clustering(
    points,
    n_clusters: int,
    *,
    k: int = 16,
    config: ClusterConfig | None = None,
    prune: str = "soft",
    alpha: float = 0.8,
    passes: int = 16,
    graph: DirectedGraph | None = None,
) -> PipelineResult:
    """k-NN graph, dendrogram, then a flat ``n_clusters`` partition."""
    if graph is None:
        graph = build_knn_graph(points if isinstance(points, PointSet) else PointSet(points), k)
    trace = ClusterTrace()
    d = cluster(graph, config, trace=trace)
    labels, pruned = partition(d, graph, n_clusters, prune=prune, alpha=alpha, passes=passes)
    return PipelineResult(labels, d, pruned, graph, trace)
