"""
Quickstart: clustering Gaussian blobs
=====================================

Build a k-nearest-neighbor graph, grow a dendrogram by repeated sampling and
condensing, then cut it down to a flat partition.

    python demos/quickstart.py
"""
from collections import Counter

from sampclust import ClusterTrace, ami, build_knn_graph, cluster, partition
from sampclust.cluster import Branch, iter_leaves
from sampclust.datasets import gaussian_blobs

# Six well separated blobs in five dimensions.
points = gaussian_blobs(3000, centers=6, dim=5, seed=1)
graph = build_knn_graph(points, k=16)
print(f"graph: {graph.n_vertices} vertices, {graph.n_edges} edges")

# The dendrogram is not binary: a branch gets one child per connected
# component left after condensing.
trace = ClusterTrace()
tree = cluster(graph, trace=trace)
leaves = list(iter_leaves(tree))
print(f"dendrogram: {len(leaves)} leaves from {trace.calls} recursive calls, depth {trace.max_depth}")


def widths(node):
    if isinstance(node, Branch):
        yield len(node.children)
        for child in node.children:
            yield from widths(child)


print("branching factors:", sorted(Counter(widths(tree)).items()))

# Every vertex sits in exactly one leaf, including the ones removed along the
# way; they follow their representatives down the association chains.
print("vertices covered by leaves:", sum(leaf.size for leaf in leaves))

# Smooth, prune to six clusters, smooth again.
labels, pruned = partition(tree, graph, 6)
print("cluster sizes:", sorted(Counter(labels.tolist()).values(), reverse=True))
print(f"AMI against the blob labels: {ami(labels, points.labels):.4f}")
