"""
Pendigits, end to end
=====================

Pendigits holds 10,992 pen trajectories resampled to 8 points (16 features)
and labeled with the digit that was written. This script runs the default
pipeline stage by stage and reports what each stage contributes.

Fetch the data first:

    python scripts/fetch_pendigits.py
    python demos/pendigits.py
"""
import time

import numpy as np

from sampclust import ClusterTrace, ami, build_knn_graph, cluster, nmi, smooth, soft_prune
from sampclust.cluster import flatten, from_labels, n_leaves
from sampclust.datasets import load_pendigits
from sampclust.postprocess import compact

pts = load_pendigits()
y = pts.labels
print(f"{pts.points.shape[0]} points, {pts.points.shape[1]} features, {len(np.unique(y))} classes")

start = time.perf_counter()
g = build_knn_graph(pts, 16)
print(f"16-NN graph in {time.perf_counter() - start:.2f} s")

# %% Dendrogram
# Defaults: indegree sampling at r = 0.2, visit-order condensing to t = 16
# within two hops, one Jaccard condensing pass up front, strong components.
trace = ClusterTrace()
start = time.perf_counter()
tree = cluster(g, trace=trace)
print(f"dendrogram in {time.perf_counter() - start:.2f} s: {n_leaves(tree)} leaves, "
      f"{len(trace.forest)} sampling passes, {trace.work} vertices processed in total")

# %% Flat partition
# Leaves are far more numerous than classes. Smoothing first lets tiny
# leaves drain into their neighbors; soft pruning then folds the smallest
# leaves into siblings until ten remain.
n = g.n_vertices
leaf_labels = flatten(tree, n)
changes = []
smoothed = smooth(leaf_labels, g, 16, changes=changes)
refilled = from_labels(tree, smoothed)
print(f"pre-prune smoothing changed {changes} vertices per pass; "
      f"{n_leaves(refilled)} non-empty leaves remain")

pruned = soft_prune(refilled, 10)
raw = compact(flatten(pruned, n))
changes = []
final = smooth(raw, g, 16, changes=changes)
print(f"post-prune smoothing changed {changes} vertices per pass")

# %% Scores
for name, labels in (("pruned, no final smoothing", raw), ("final", final)):
    print(f"{name:>28}: AMI {ami(labels, y):.4f}  NMI {nmi(labels, y):.4f}")

# Confusions concentrate in a few digit pairs.
table = np.zeros((10, 10), dtype=int)
np.add.at(table, (y, final), 1)
dominant = table.argmax(axis=0)
for cluster_id in np.argsort(dominant):
    col = table[:, cluster_id]
    share = col.max() / col.sum()
    print(f"cluster {cluster_id}: {col.sum():5d} points, {share:.0%} are digit {dominant[cluster_id]}")
