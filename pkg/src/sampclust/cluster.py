"""Divisive clustering by repeated graph summarization.

Each call samples vertices for removal, binds them to remaining
representatives, condenses what is left and recurses on every connected
component. A call that removes nothing, or would remove everything, becomes
a leaf holding its vertices plus everything bound to them.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np

from .associate import AssociationForest, associate_local, resolve
from .errors import InvalidInput, InvalidParameter
from .graph import DirectedGraph, split_components
from .summarize import CondenseConfig, SamplingConfig, condense, sample_mask, vertex_scores


@dataclass
class Leaf:
    items: list[int]

    def __post_init__(self):
        self.items = sorted(int(v) for v in self.items)

    @property
    def size(self) -> int:
        return len(self.items)


@dataclass
class Branch:
    children: list["Dendrogram"] = field(default_factory=list)

    @property
    def size(self) -> int:
        return sum(c.size for c in self.children)


Dendrogram = Union[Leaf, Branch]


def iter_leaves(d: Dendrogram) -> Iterator[Leaf]:
    """Leaves in depth-first, left-to-right order."""
    stack = [d]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            yield node
        else:
            stack.extend(reversed(node.children))


def n_leaves(d: Dendrogram) -> int:
    return sum(1 for _ in iter_leaves(d))


def depth(d: Dendrogram) -> int:
    if isinstance(d, Leaf):
        return 0
    return 1 + max((depth(c) for c in d.children), default=0)


def validate_dendrogram(d: Dendrogram, n_vertices: int | None = None) -> None:
    """Check that leaves are disjoint and, given ``n_vertices``, cover ``0..n-1``."""
    seen: set[int] = set()
    for leaf in iter_leaves(d):
        for v in leaf.items:
            if v in seen:
                raise InvalidInput(f"vertex {v} appears in more than one leaf")
            seen.add(v)
    if n_vertices is not None and seen != set(range(n_vertices)):
        missing = set(range(n_vertices)) - seen
        extra = seen - set(range(n_vertices))
        raise InvalidInput(
            f"leaves do not cover 0..{n_vertices - 1}: "
            f"{len(missing)} missing, {len(extra)} unexpected"
        )


@dataclass(frozen=True)
class ClusterConfig:
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    condensing: CondenseConfig = field(default_factory=CondenseConfig)
    components: str = "strong"
    precondense: CondenseConfig | None = field(
        default_factory=lambda: CondenseConfig(t=16, depth=2, measure="jaccard")
    )

    def __post_init__(self):
        if self.components not in ("strong", "weak"):
            raise InvalidParameter(f"component mode must be 'strong' or 'weak', got {self.components!r}")

    def as_dict(self) -> dict:
        def cond(c):
            if c is None:
                return None
            return {"t": c.t, "depth": c.depth, "measure": c.measure}

        return {
            "sampling": {
                "rate": self.sampling.rate,
                "measure": self.sampling.measure,
                "seed": self.sampling.seed,
            },
            "condensing": cond(self.condensing),
            "components": self.components,
            "precondense": cond(self.precondense),
        }


@dataclass
class ClusterTrace:
    """Diagnostics collected during one run."""

    forest: AssociationForest = field(default_factory=AssociationForest)
    survivors: list[list[int]] = field(default_factory=list)
    max_depth: int = 0
    calls: int = 0
    work: int = 0  # total vertices over all sampled subgraphs


class _Run:
    def __init__(self, cfg: ClusterConfig, trace: ClusterTrace):
        self.cfg = cfg
        self.trace = trace
        self.rng = np.random.default_rng(cfg.sampling.seed)
        self.n_total = 0

    def split(self, g: DirectedGraph) -> list[DirectedGraph]:
        return split_components(g, self.cfg.components)

    def recurse(self, g: DirectedGraph, level: int):
        # returns a nested structure of survivor groups; leaves are filled later
        trace = self.trace
        trace.calls += 1
        trace.work += g.n_vertices
        trace.max_depth = max(trace.max_depth, level)
        if level > self.n_total:
            raise RuntimeError("recursion deeper than the vertex count")
        s = self.cfg.sampling
        removed = sample_mask(vertex_scores(g, s.measure, self.rng), s.rate)
        if not removed.any() or removed.all():
            trace.survivors.append(g.vertices)
            return len(trace.survivors) - 1
        rep = associate_local(g, removed)
        ids = g.ids
        trace.forest.append(dict(zip(ids[removed].tolist(), ids[rep[removed]].tolist())))
        h = condense(g, removed, self.cfg.condensing)
        children = [self.recurse(sub, level + 1) for sub in self.split(h)]
        return children[0] if len(children) == 1 else children


def cluster(g: DirectedGraph, cfg: ClusterConfig | None = None, *, trace: ClusterTrace | None = None) -> Dendrogram:
    """Build a non-binary dendrogram over the vertices of ``g``.

    The optional pre-condense pass runs once on the whole input. A
    disconnected input is split into components first, without sampling, and
    each component becomes a child of the root. Branches with a single child
    are collapsed.
    """
    if g.n_vertices == 0:
        raise InvalidInput("cannot cluster an empty graph")
    cfg = cfg or ClusterConfig()
    trace = trace if trace is not None else ClusterTrace()
    run = _Run(cfg, trace)
    run.n_total = g.n_vertices

    if cfg.precondense is not None:
        g = condense(g, (), cfg.precondense)

    limit = sys.getrecursionlimit()
    if limit < 10_000:
        sys.setrecursionlimit(10_000)
    try:
        parts = run.split(g)
        if len(parts) == 1:
            shape = run.recurse(g, 0)
        else:
            shape = [run.recurse(sub, 1) for sub in parts]
    finally:
        sys.setrecursionlimit(limit)

    members: dict[int, list[int]] = {}
    owner = {}
    for i, group in enumerate(trace.survivors):
        members[i] = []
        for v in group:
            owner[v] = i
    for v, root in resolve(trace.forest, owner).items():
        members[owner[root]].append(v)

    def build(node) -> Dendrogram:
        if isinstance(node, int):
            return Leaf(members[node])
        return Branch([build(c) for c in node])

    return build(shape)


def flatten(d: Dendrogram, n_vertices: int | None = None) -> np.ndarray:
    """Label each vertex with the depth-first index of its leaf."""
    leaves = list(iter_leaves(d))
    if n_vertices is None:
        n_vertices = 1 + max((max(l.items) for l in leaves if l.items), default=-1)
    labels = np.full(n_vertices, -1, dtype=np.int64)
    for i, leaf in enumerate(leaves):
        labels[leaf.items] = i
    return labels


def from_labels(d: Dendrogram, labels) -> Dendrogram | None:
    """Refill the leaves of ``d`` from a labeling indexed by depth-first leaf order.

    Leaf ``i`` receives every vertex labeled ``i``. Empty leaves are dropped,
    childless branches with them, and single-child branches collapse.
    """
    labels = np.asarray(labels)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_leaves(d) + 1))
    counter = iter(range(n_leaves(d)))

    def build(node):
        if isinstance(node, Leaf):
            i = next(counter)
            items = order[bounds[i]:bounds[i + 1]]
            return Leaf(items.tolist()) if items.size else None
        kids = [k for k in (build(c) for c in node.children) if k is not None]
        if not kids:
            return None
        return kids[0] if len(kids) == 1 else Branch(kids)

    return build(d)
