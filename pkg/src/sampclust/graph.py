"""Directed graphs over stable vertex ids, k-NN construction and components."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _scipy_components
from scipy.spatial import cKDTree

from .errors import InvalidInput, InvalidParameter


@dataclass(frozen=True)
class PointSet:
    """Dense feature matrix, one row per vertex id, with optional class labels."""

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise InvalidInput(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] and pts.shape[1] < 1:
            raise InvalidInput("points need at least one feature column")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (pts.shape[0],):
                raise InvalidInput(
                    f"expected {pts.shape[0]} labels, got shape {labels.shape}"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def concat_ranges(starts: np.ndarray, stops: np.ndarray) -> np.ndarray:
    """Concatenation of ``arange(a, b)`` over paired bounds, without a Python loop."""
    lens = stops - starts
    total = int(lens.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offsets = np.cumsum(lens) - lens
    return np.repeat(starts - offsets, lens) + np.arange(total)


class DirectedGraph:
    """Unweighted digraph whose vertices keep their original ids.

    Stored as CSR arrays over the sorted vertex ids: row ``i`` holds the
    out-neighbors of ``ids[i]`` as local indices into ``ids``, ascending.
    Since ``ids`` is sorted, local order and id order agree. Dict views and
    the transpose are derived on first use. Instances are immutable.
    """

    __slots__ = ("ids", "indptr", "indices", "_adj", "_in", "_rev")

    def __init__(self, out: Mapping[int, Iterable[int]], *, validate: bool = True):
        ids = np.array(sorted(int(v) for v in out), dtype=np.int64)
        rows = [sorted(int(u) for u in out[v]) for v in ids.tolist()]
        if validate:
            known = set(ids.tolist())
            for v, ns in zip(ids.tolist(), rows):
                for i, u in enumerate(ns):
                    if u == v:
                        raise InvalidInput(f"self-loop on vertex {v}")
                    if i and ns[i - 1] == u:
                        raise InvalidInput(f"duplicate edge {v}->{u}")
                    if u not in known:
                        raise InvalidInput(f"edge {v}->{u} points outside the vertex set")
        lens = np.fromiter((len(r) for r in rows), dtype=np.int64, count=len(rows))
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lens, out=indptr[1:])
        flat = np.fromiter((u for r in rows for u in r), dtype=np.int64, count=int(indptr[-1]))
        self._set(ids, indptr, np.searchsorted(ids, flat).astype(np.int64))

    def _set(self, ids, indptr, indices):
        self.ids = ids
        self.indptr = indptr
        self.indices = indices
        self._adj = None
        self._in = None
        self._rev = None

    @classmethod
    def from_csr(cls, ids, indptr, indices) -> "DirectedGraph":
        # trusted input: sorted unique ids, sorted rows of local indices, no loops
        g = cls.__new__(cls)
        g._set(
            np.asarray(ids, dtype=np.int64),
            np.asarray(indptr, dtype=np.int64),
            np.asarray(indices, dtype=np.int64),
        )
        return g

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "DirectedGraph":
        out: dict[int, list[int]] = {int(v): [] for v in vertices}
        for v, u in edges:
            if v not in out:
                raise InvalidInput(f"edge {v}->{u} starts outside the vertex set")
            out[v].append(u)
        return cls(out)

    @property
    def vertices(self) -> list[int]:
        return self.ids.tolist()

    @property
    def n_vertices(self) -> int:
        return int(self.ids.size)

    @property
    def n_edges(self) -> int:
        return int(self.indptr[-1])

    def __len__(self):
        return int(self.ids.size)

    def __contains__(self, v):
        i = int(np.searchsorted(self.ids, v))
        return i < self.ids.size and int(self.ids[i]) == v

    def out(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def in_(self, v: int) -> tuple[int, ...]:
        return self.in_index()[v]

    @property
    def adjacency(self) -> Mapping[int, tuple[int, ...]]:
        if self._adj is None:
            self._adj = _rows_as_dict(self.ids, self.indptr, self.indices)
        return self._adj

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.ids.size)

    def reverse_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of the transpose, in local indices with ascending rows."""
        if self._rev is None:
            n = self.ids.size
            src = np.repeat(np.arange(n), np.diff(self.indptr))
            order = np.argsort(self.indices, kind="stable")
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(self.indices, minlength=n), out=indptr[1:])
            self._rev = (indptr, src[order])
        return self._rev

    def in_index(self) -> Mapping[int, tuple[int, ...]]:
        if self._in is None:
            self._in = _rows_as_dict(self.ids, *self.reverse_csr())
        return self._in

    def to_scipy(self, dtype=np.int8) -> csr_matrix:
        n = self.ids.size
        data = np.ones(self.indices.size, dtype=dtype)
        return csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def edges(self):
        for v, ns in self.adjacency.items():
            for u in ns:
                yield v, u

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            np.array_equal(self.ids, other.ids)
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.ids.tobytes(), self.indptr.tobytes(), self.indices.tobytes()))

    def __repr__(self):
        return f"DirectedGraph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


def _rows_as_dict(ids, indptr, indices) -> dict[int, tuple[int, ...]]:
    glob = ids[indices].tolist()
    ptr = indptr.tolist()
    return {v: tuple(glob[ptr[i]:ptr[i + 1]]) for i, v in enumerate(ids.tolist())}


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between broadcast-compatible row sets.

    Accumulates one coordinate at a time so that the value for a given pair
    does not depend on the shape of the batch it was computed in.
    """
    acc = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]))
    for j in range(a.shape[-1]):
        diff = a[..., j] - b[..., j]
        acc += diff * diff
    return acc


def _select_k(query: int, cand: np.ndarray, d2: np.ndarray, k: int) -> np.ndarray:
    keep = cand != query
    cand, d2 = cand[keep], d2[keep]
    order = np.lexsort((cand, d2))
    return cand[order[:k]]


def _knn_brute(x: np.ndarray, k: int) -> np.ndarray:
    n = x.shape[0]
    chunk = max(1, int(4_000_000 // max(1, n * x.shape[1])))
    ids = np.arange(n)
    result = np.empty((n, k), dtype=np.int64)
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        d2 = squared_distances(x[start:stop, None, :], x[None, :, :])
        for row, q in enumerate(range(start, stop)):
            result[q] = _select_k(q, ids, d2[row], k)
    return result


def _knn_tree(x: np.ndarray, k: int, workers: int = 1) -> np.ndarray:
    n = x.shape[0]
    tree = cKDTree(x)
    result = np.empty((n, k), dtype=np.int64)
    todo = np.arange(n)
    m = min(n, k + 4)
    while todo.size:
        _, idx = tree.query(x[todo], k=m, workers=workers)
        idx = idx.reshape(todo.size, m)
        exact = squared_distances(x[todo][:, None, :], x[idx])
        # the query point, or a duplicate standing in for it, may take a slot
        masked = np.where(idx != todo[:, None], exact, np.inf)
        kth = np.sort(masked, axis=1)[:, k - 1]
        # a candidate tied with the k-th may have been cut off by the query
        retry = exact.max(axis=1) <= kth * (1 + 1e-9) + 1e-300
        if m >= n:
            retry[:] = False
        # order rows by (distance, id) with self pushed to the end
        key_d = np.where(idx != todo[:, None], exact, np.inf)
        order = np.lexsort((idx, key_d), axis=1)
        picked = np.take_along_axis(idx, order[:, :k], axis=1)
        done = ~retry
        result[todo[done]] = picked[done]
        todo = todo[retry]
        m = min(n, 2 * m)
    return result


def knn_table(points: PointSet | np.ndarray, k: int, method: str = "tree", workers: int = 1) -> np.ndarray:
    """Return an (n, k) array of neighbor ids, each row sorted by (distance, id).

    ``workers`` is passed to the tree query; the brute method ignores it.
    """
    x = points.points if isinstance(points, PointSet) else PointSet(points).points
    n = x.shape[0]
    if n == 0:
        raise InvalidInput("cannot build a k-NN graph from an empty point set")
    if not 1 <= k < n:
        raise InvalidParameter(f"k must satisfy 1 <= k < n={n}, got {k}")
    if method == "brute":
        return _knn_brute(x, k)
    if method == "tree":
        return _knn_tree(x, k, workers)
    raise InvalidParameter(f"unknown k-NN method {method!r}")


def build_knn_graph(points: PointSet | np.ndarray, k: int, method: str = "tree", workers: int = 1) -> DirectedGraph:
    """Directed k-nearest-neighbor graph under the Euclidean metric.

    Ties in distance go to the smaller vertex id, so ``brute`` and ``tree``
    yield the same graph. The query point itself is never its own neighbor,
    even when duplicated.
    """
    table = np.sort(knn_table(points, k, method, workers), axis=1)
    n = table.shape[0]
    return DirectedGraph.from_csr(np.arange(n), np.arange(0, n * k + 1, k), table.ravel())


def subgraph_mask(g: DirectedGraph, keep: np.ndarray) -> DirectedGraph:
    """Induced subgraph on a boolean mask over local indices."""
    n = g.n_vertices
    newpos = np.cumsum(keep) - 1
    src = np.repeat(np.arange(n), np.diff(g.indptr))
    ok = keep[src] & keep[g.indices]
    counts = np.bincount(src[ok], minlength=n)[keep]
    indptr = np.zeros(counts.size + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return DirectedGraph.from_csr(g.ids[keep], indptr, newpos[g.indices[ok]])


def local_mask(g: DirectedGraph, vertices: Iterable[int]) -> np.ndarray:
    """Boolean mask over local indices; unknown ids raise ``InvalidParameter``."""
    if isinstance(vertices, np.ndarray):
        vs = vertices.astype(np.int64, copy=False).ravel()
    else:
        vs = np.fromiter((int(v) for v in vertices), dtype=np.int64)
    mask = np.zeros(g.n_vertices, dtype=bool)
    if vs.size == 0:
        return mask
    pos = np.searchsorted(g.ids, vs)
    clipped = np.minimum(pos, max(g.n_vertices - 1, 0))
    bad = (pos >= g.n_vertices) | (g.ids[clipped] != vs) if g.n_vertices else np.ones(vs.size, bool)
    if np.any(bad):
        raise InvalidParameter(f"vertices not in graph: {np.unique(vs[bad])[:10].tolist()}")
    mask[pos] = True
    return mask


def induced_subgraph(g: DirectedGraph, keep: Iterable[int]) -> DirectedGraph:
    return subgraph_mask(g, local_mask(g, keep))


def component_labels(g: DirectedGraph, mode: str = "strong") -> tuple[int, np.ndarray]:
    """Component number per local vertex, numbered by smallest member."""
    if mode not in ("strong", "weak"):
        raise InvalidParameter(f"component mode must be 'strong' or 'weak', got {mode!r}")
    if g.n_vertices == 0:
        return 0, np.zeros(0, dtype=np.int64)
    count, labels = _scipy_components(g.to_scipy(), directed=True, connection=mode)
    _, first = np.unique(labels, return_index=True)
    rank = np.empty(count, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(count)
    return int(count), rank[labels]


def connected_components(g: DirectedGraph, mode: str = "strong") -> list[list[int]]:
    """Partition the vertices into maximal strongly or weakly connected sets.

    Each component is returned sorted; components are ordered by their
    smallest vertex id.
    """
    count, labels = component_labels(g, mode)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    ids = g.ids[order]
    return [ids[bounds[i]:bounds[i + 1]].tolist() for i in range(count)]


def split_components(g: DirectedGraph, mode: str = "strong") -> list[DirectedGraph]:
    """Induced subgraph of every component, in component order."""
    count, labels = component_labels(g, mode)
    if count <= 1:
        return [g]
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    # one shared edge filter for all parts
    n = g.n_vertices
    src = np.repeat(np.arange(n), np.diff(g.indptr))
    same = labels[src] == labels[g.indices]
    newpos = np.empty(n, dtype=np.int64)
    for c in range(count):
        members = order[bounds[c]:bounds[c + 1]]
        newpos[members] = np.arange(members.size)
    e_src, e_dst = src[same], g.indices[same]
    e_order = np.argsort(labels[e_src], kind="stable")
    e_src, e_dst = e_src[e_order], e_dst[e_order]
    e_bounds = np.searchsorted(labels[e_src], np.arange(count + 1))
    parts = []
    for c in range(count):
        members = order[bounds[c]:bounds[c + 1]]
        es, ed = e_src[e_bounds[c]:e_bounds[c + 1]], e_dst[e_bounds[c]:e_bounds[c + 1]]
        indptr = np.zeros(members.size + 1, dtype=np.int64)
        np.cumsum(np.bincount(newpos[es], minlength=members.size), out=indptr[1:])
        parts.append(DirectedGraph.from_csr(g.ids[members], indptr, newpos[ed]))
    return parts
