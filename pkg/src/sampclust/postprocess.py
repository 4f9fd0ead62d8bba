"""Turning dendrograms into flat partitions: pruning and smoothing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import Branch, Dendrogram, Leaf
from .errors import InvalidInput, InvalidParameter
from .graph import DirectedGraph


@dataclass(frozen=True)
class PruneConfig:
    n: int
    alpha: float = 0.8

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter(f"n must be >= 1, got {self.n}")
        if not 0 < self.alpha <= 1:
            raise InvalidParameter(f"alpha must lie in (0, 1], got {self.alpha}")


class _Node:
    __slots__ = ("items", "children", "parent", "size", "rank")

    def __init__(self, items=None, children=None, parent=None, rank=0):
        self.items = items
        self.children = children
        self.parent = parent
        self.size = 0
        self.rank = rank

    @property
    def is_leaf(self):
        return self.children is None


class _Tree:
    """Mutable copy of a dendrogram with parent links and cached sizes."""

    def __init__(self, d: Dendrogram):
        self.leaves: list[_Node] = []
        self.branches: list[_Node] = []
        self.root = self._copy(d, None)

    def _copy(self, d, parent):
        if isinstance(d, Leaf):
            node = _Node(items=list(d.items), parent=parent, rank=len(self.leaves))
            node.size = len(node.items)
            self.leaves.append(node)
            return node
        node = _Node(children=[], parent=parent, rank=len(self.branches))
        self.branches.append(node)
        for c in d.children:
            node.children.append(self._copy(c, node))
        node.size = sum(c.size for c in node.children)
        return node

    def replace(self, old: _Node, new: _Node):
        parent = old.parent
        new.parent = parent
        if parent is None:
            self.root = new
        else:
            parent.children[parent.children.index(old)] = new

    def freeze(self) -> Dendrogram:
        def build(node):
            if node.is_leaf:
                return Leaf(node.items)
            return Branch([build(c) for c in node.children])

        return build(self.root)


def hard_prune(d: Dendrogram, cfg: PruneConfig) -> Dendrogram:
    """Merge the smallest end branch into one leaf until the ``n`` largest
    leaves hold at least ``alpha`` of all objects.

    Only whole end branches are merged, so the tree keeps its original shape
    above the merge points. Stops early rather than leave fewer than ``n``
    leaves.
    """
    tree = _Tree(d)
    total = tree.root.size
    n = cfg.n
    leaves = set(tree.leaves)
    branches = set(tree.branches)
    while True:
        sizes = sorted((l.size for l in leaves), reverse=True)
        if sum(sizes[:n]) >= cfg.alpha * total:
            break
        ends = [b for b in branches if all(c.is_leaf for c in b.children)]
        if not ends:
            break
        b = min(ends, key=lambda x: (x.size, x.rank))
        if len(leaves) - len(b.children) + 1 < n:
            break
        merged = _Node(items=[v for c in b.children for v in c.items], rank=min(c.rank for c in b.children))
        merged.size = b.size
        for c in b.children:
            leaves.discard(c)
        branches.discard(b)
        tree.replace(b, merged)
        leaves.add(merged)
    return tree.freeze()


def soft_prune(d: Dendrogram, n: int) -> Dendrogram:
    """Reduce the dendrogram to exactly ``n`` leaves (when it has at least ``n``).

    The smallest leaf merges with its smallest sibling when that sibling is a
    leaf, or moves down into the sibling branch otherwise. Parents left with
    one child are replaced by that child.
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    tree = _Tree(d)
    leaves = set(tree.leaves)
    while len(leaves) > n:
        leaf = min(leaves, key=lambda x: (x.size, x.rank))
        p = leaf.parent
        if p is None:
            break
        if len(p.children) > 1:
            brothers = [(c.size, i, c) for i, c in enumerate(p.children) if c is not leaf]
            _, _, b = min(brothers, key=lambda x: x[:2])
            p.children.remove(leaf)
            if b.is_leaf:
                b.items.extend(leaf.items)
                b.size += leaf.size
                leaves.discard(leaf)
            else:
                b.children.append(leaf)
                leaf.parent = b
                b.size += leaf.size
        if len(p.children) == 1:
            tree.replace(p, p.children[0])
    return tree.freeze()


def _edge_arrays(g: DirectedGraph, n: int):
    if g.n_vertices and (g.ids[-1] >= n or g.ids[0] < 0):
        raise InvalidInput(f"graph vertex {int(g.ids[-1])} has no label")
    src = np.repeat(g.ids, g.out_degrees())
    return src, g.ids[g.indices]


def smooth_step(labels: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """One synchronous majority vote over out-neighbors; ties keep the label."""
    new = labels.copy()
    if src.size == 0:
        return new
    nl = labels[dst]
    order = np.lexsort((nl, src))
    s, l = src[order], nl[order]
    start = np.flatnonzero(np.r_[True, (s[1:] != s[:-1]) | (l[1:] != l[:-1])])
    counts = np.diff(np.r_[start, s.size])
    ps, pl = s[start], l[start]
    # pairs are grouped by source vertex
    vstart = np.flatnonzero(np.r_[True, ps[1:] != ps[:-1]])
    vmax = np.maximum.reduceat(counts, vstart)
    group = np.repeat(np.arange(vstart.size), np.diff(np.r_[vstart, ps.size]))
    is_max = counts == vmax[group]
    n_max = np.add.reduceat(is_max.astype(np.int64), vstart)
    # first pair reaching the maximum in each group
    first = np.full(vstart.size, -1)
    hits = np.flatnonzero(is_max)
    first_hit = np.r_[True, group[hits][1:] != group[hits][:-1]]
    first[group[hits[first_hit]]] = hits[first_hit]
    unique = n_max == 1
    verts = ps[vstart][unique]
    new[verts] = pl[first[unique]]
    return new


def smooth(labels, g: DirectedGraph, passes: int = 16, *, changes: list | None = None) -> np.ndarray:
    """Relabel every vertex with the most common label among its out-neighbors.

    Updates are synchronous. A vertex whose neighbors tie, or that has no
    neighbors, keeps its label. Stops early at a fixed point; the number of
    changed vertices per pass is appended to ``changes`` when given.
    """
    if passes < 0:
        raise InvalidParameter(f"passes must be >= 0, got {passes}")
    labels = np.asarray(labels).copy()
    src, dst = _edge_arrays(g, labels.size)
    for _ in range(passes):
        new = smooth_step(labels, src, dst)
        changed = int(np.count_nonzero(new != labels))
        if changes is not None:
            changes.append(changed)
        labels = new
        if changed == 0:
            break
    return labels


def compact(labels) -> np.ndarray:
    """Renumber cluster ids to 0..m-1 in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inverse.ravel()]
