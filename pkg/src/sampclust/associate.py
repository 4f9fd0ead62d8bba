"""Bind removed vertices to a nearest remaining representative.

Both searches walk edges in either direction (out- and in-neighbors), so hop
distance is symmetric and every removed vertex of a weakly connected graph
can reach a remaining one. The representative is the smallest-id remaining
vertex among those at the minimal hop distance; the two searches agree
exactly under that rule.
"""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .errors import CorruptForest, UnreachableRepresentative
from .graph import DirectedGraph, concat_ranges, local_mask


def _undirected(g: DirectedGraph) -> dict[int, list[int]]:
    adj = g.adjacency
    rev = g.in_index()
    both = {}
    for v in adj:
        both[v] = sorted(set(adj[v]).union(rev[v]))
    return both


def associate_simple(g: DirectedGraph, removed: Iterable[int], *, stats: dict | None = None) -> dict[int, int]:
    """One breadth-first search per removed vertex.

    Quadratic in the worst case (a long chain with one remaining end).
    ``stats["edge_visits"]`` counts adjacency entries scanned.
    """
    removed = set(removed)
    nbrs = _undirected(g)
    visits = 0
    rep = {}
    for v in sorted(removed):
        seen = {v}
        frontier = [v]
        found = None
        while frontier and found is None:
            nxt = []
            for x in frontier:
                for u in nbrs[x]:
                    visits += 1
                    if u in seen:
                        continue
                    seen.add(u)
                    if u not in removed:
                        if found is None or u < found:
                            found = u
                    else:
                        nxt.append(u)
            frontier = nxt
        if found is None:
            raise UnreachableRepresentative(f"vertex {v} cannot reach a remaining vertex")
        rep[v] = found
    if stats is not None:
        stats["edge_visits"] = visits
    return rep


def undirected_csr(g: DirectedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Local CSR of the symmetric closure, rows ascending and duplicate-free."""
    n = g.n_vertices
    src = np.repeat(np.arange(n), g.out_degrees())
    a = np.concatenate([src, g.indices])
    b = np.concatenate([g.indices, src])
    keys = np.unique(a * n + b)
    rows, cols = np.divmod(keys, max(n, 1))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols


def associate_local(g: DirectedGraph, removed: np.ndarray, stats: dict | None = None) -> np.ndarray:
    """Representative (local index) for every local vertex; survivors map to themselves."""
    n = g.n_vertices
    label = np.where(removed, -1, np.arange(n))
    pending = int(removed.sum())
    visits = 0
    if pending:
        indptr, nbrs = undirected_csr(g)
        frontier = np.flatnonzero(~removed)
        # level by level; a vertex first reached at this level takes the
        # smallest label offered by any frontier vertex
        while pending and frontier.size:
            starts, stops = indptr[frontier], indptr[frontier + 1]
            visits += int((stops - starts).sum())
            reached = nbrs[concat_ranges(starts, stops)]
            offered = np.repeat(label[frontier], stops - starts)
            new = label[reached] < 0
            reached, offered = reached[new], offered[new]
            if reached.size == 0:
                break
            order = np.lexsort((offered, reached))
            reached, offered = reached[order], offered[order]
            head = np.r_[True, reached[1:] != reached[:-1]]
            frontier = reached[head]
            label[frontier] = offered[head]
            pending -= frontier.size
    if stats is not None:
        stats["edge_visits"] = visits
    if pending:
        v = int(g.ids[np.flatnonzero(label < 0)[0]])
        raise UnreachableRepresentative(f"vertex {v} cannot reach a remaining vertex")
    return label


def associate_multisource(g: DirectedGraph, removed: Iterable[int], *, stats: dict | None = None) -> dict[int, int]:
    """A single breadth-first flood from all remaining vertices at once.

    Every vertex is expanded at most once, so each adjacency entry of the
    symmetric closure is scanned at most once. A vertex reached by several
    sources at the same depth keeps the smallest source id.
    """
    mask = local_mask(g, removed)
    label = associate_local(g, mask, stats)
    idx = np.flatnonzero(mask)
    return dict(zip(g.ids[idx].tolist(), g.ids[label[idx]].tolist()))


class AssociationForest:
    """Append-only record of representative links, one map per sampling pass."""

    def __init__(self, passes: Iterable[Mapping[int, int]] = ()):
        self.passes: list[dict[int, int]] = [dict(p) for p in passes]

    def append(self, rep: Mapping[int, int]) -> None:
        self.passes.append(dict(rep))

    def links(self) -> dict[int, int]:
        merged: dict[int, int] = {}
        for p in self.passes:
            merged.update(p)
        return merged

    def __len__(self):
        return len(self.passes)


def resolve(forest: AssociationForest | Iterable[Mapping[int, int]], survivors: Iterable[int]) -> dict[int, int]:
    """Map every vertex in the forest or in ``survivors`` to its terminal survivor."""
    if not isinstance(forest, AssociationForest):
        forest = AssociationForest(forest)
    links = forest.links()
    survivors = set(survivors)
    out = {s: s for s in survivors}
    for start in links:
        if start in out:
            continue
        path = []
        v = start
        while v not in out:
            if v not in links or len(path) > len(links):
                raise CorruptForest(f"chain from {start} does not reach a survivor (stuck at {v})")
            path.append(v)
            v = links[v]
        root = out[v]
        for p in path:
            out[p] = root
    return out
