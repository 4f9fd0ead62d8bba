"""
Why sampling and condensing keep clusters apart
===============================================

Three small experiments on the building blocks of the method:

1. Sampling by indegree removes boundary vertices first, so the survivors
   are more often "positive" (all their neighbors share their class).
2. Condensing rewires survivors to nearby vertices; the share of edges that
   stay inside a class tells how well each ranking measure does that.
3. Repeated condensing erodes connectivity; the Jaccard ranking erodes it
   faster than visit order, which is why it suits a single pre-pass.

    python demos/measures.py            # Pendigits parts need data/pendigits.csv
"""
import time

import numpy as np

from sampclust import DirectedGraph, associate_multisource, build_knn_graph, condense, graph_connectivity
from sampclust.datasets import load_pendigits, pendigits_path
from sampclust.experiments import (
    connectivity_decay,
    edge_positivity_trace,
    positivity_after_sampling,
    random_out_graph,
)
from sampclust.summarize import CondenseConfig, sample, score_vertices

# %% One summarization pass by hand
# A 0-1-2-3-4 path plus a pendant vertex 5 pointing at 2. At r = 0.4 the
# quota is two vertices, but every vertex scoring at most the second-lowest
# score goes, so the tie at indegree 1 removes three.
g = DirectedGraph({0: [1], 1: [0, 2], 2: [1, 3], 3: [2, 4], 4: [3], 5: [2]})
scores = score_vertices(g, "indegree")
removed = sample(g, scores, 0.4)
print("indegree:", scores)
print("removed:", sorted(removed))
print("representatives:", associate_multisource(g, removed))
h = condense(g, removed, CondenseConfig(t=2, depth=2))
print("condensed:", {v: list(ns) for v, ns in h.adjacency.items()})

# %% Positivity and edge positivity on Pendigits
if pendigits_path() is not None:
    pts = load_pendigits()
    knn = build_knn_graph(pts, 16)
    vals = positivity_after_sampling(knn, pts.labels, ("random", "indegree", "mutual"))
    print("\nvertex positivity of survivors after one pass at r = 0.2")
    for measure, v in vals.items():
        print(f"  {measure:>8}: {np.mean(v):.4f}")

    print("\nedge positivity after five rounds of 10% random removal plus condensing")
    for measure in ("visit", "jaccard", "euclidean"):
        trace = edge_positivity_trace(knn, pts.labels, measure, points=pts)
        print(f"  {measure:>9}: " + " ".join(f"{x:.4f}" for x in trace))
else:
    print("\n(data/pendigits.csv not found; skipping the Pendigits experiments)")

# %% Connectivity decay
# A random graph where each of 256 vertices points to 16 others. Each round
# condenses, then deletes 10% of the vertices at random. Under Jaccard
# ranking the graph holds up for a while and then falls apart between rounds
# 6 and 8. This section takes about a minute, mostly max-flow.
start = time.perf_counter()
base = random_out_graph(256, 16, seed=0)
print(f"\nconnectivity of the random graph: {graph_connectivity(base):.3f}")
for measure in ("visit", "jaccard"):
    trail = connectivity_decay(base, measure, seed=0)
    values = [graph_connectivity(trail[i - 1]) for i in (6, 8, 10)]
    print(f"  {measure:>7}, rounds 6/8/10: " + " ".join(f"{c:.3f}" for c in values))
print(f"({time.perf_counter() - start:.0f} s)")
