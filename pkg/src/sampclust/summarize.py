"""Vertex sampling and graph condensing.

A summarization pass picks a set of vertices to drop (by score, lowest first)
and then rewires each remaining vertex to ``t`` nearby remaining vertices found
by a depth-limited breadth-first search.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix, identity

from .errors import ConfigurationError, InvalidParameter
from .graph import DirectedGraph, PointSet, local_mask, squared_distances, subgraph_mask

SAMPLING_MEASURES = ("random", "indegree", "mutual")
CONDENSE_MEASURES = ("visit", "jaccard", "euclidean")
_CONDENSE_ALIASES = {"visit_order": "visit", "shared": "jaccard", "distance": "euclidean"}

# rows per vectorized block, scaled down by the candidate width
_BLOCK_CELLS = 1 << 20


@dataclass(frozen=True)
class SamplingConfig:
    rate: float = 0.2
    measure: str = "indegree"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.rate < 1:
            raise InvalidParameter(f"sampling rate must lie in (0, 1), got {self.rate}")
        if self.measure not in SAMPLING_MEASURES:
            raise InvalidParameter(f"unknown sampling measure {self.measure!r}")


@dataclass(frozen=True)
class CondenseConfig:
    t: int = 16
    depth: int = 2
    measure: str = "visit"
    points: PointSet | np.ndarray | None = None

    def __post_init__(self):
        measure = _CONDENSE_ALIASES.get(self.measure, self.measure)
        object.__setattr__(self, "measure", measure)
        if measure not in CONDENSE_MEASURES:
            raise InvalidParameter(f"unknown condensing measure {self.measure!r}")
        if self.t < 1:
            raise InvalidParameter(f"t must be >= 1, got {self.t}")
        if self.depth < 0:
            raise InvalidParameter(f"depth must be >= 0, got {self.depth}")
        if measure == "euclidean" and self.points is None:
            raise ConfigurationError("the euclidean condensing measure needs points")

    @property
    def coords(self) -> np.ndarray | None:
        if self.points is None:
            return None
        if isinstance(self.points, PointSet):
            return self.points.points
        return np.asarray(self.points, dtype=np.float64)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def vertex_scores(g: DirectedGraph, measure: str = "indegree", seed=0) -> np.ndarray:
    """Scores aligned with ``g.ids``; see :func:`score_vertices`."""
    if measure == "random":
        return _rng(seed).random(g.n_vertices)
    if measure == "indegree":
        return g.in_degrees().astype(np.float64)
    if measure == "mutual":
        n = g.n_vertices
        src = np.repeat(np.arange(n), g.out_degrees())
        keys = src * n + g.indices  # already ascending
        back = g.indices * n + src
        pos = np.minimum(np.searchsorted(keys, back), max(keys.size - 1, 0))
        hit = keys[pos] == back if keys.size else np.zeros(0, bool)
        return np.bincount(src[hit], minlength=n).astype(np.float64)
    raise InvalidParameter(f"unknown sampling measure {measure!r}")


def score_vertices(g: DirectedGraph, measure: str = "indegree", seed=0) -> dict[int, float]:
    """Score every vertex; the lowest scores are removed first.

    ``seed`` may be an int or a ``numpy.random.Generator`` and only matters
    for the ``random`` measure.
    """
    return dict(zip(g.vertices, vertex_scores(g, measure, seed).tolist()))


def removal_count(n: int, rate: float) -> int:
    # guard against 0.29 * 100 == 28.999999999999996
    return math.floor(rate * n + 1e-9)


def sample_mask(values: np.ndarray, rate: float) -> np.ndarray:
    """Mask of entries at or below the ``floor(rate*n)``-th smallest value."""
    n = removal_count(values.size, rate)
    if n == 0:
        return np.zeros(values.size, dtype=bool)
    threshold = np.partition(values, n - 1)[n - 1]
    return values <= threshold


def sample(g: DirectedGraph, scores, rate: float) -> frozenset[int]:
    """Vertices whose score is at or below the ``floor(rate*|V|)``-th smallest.

    Ties at the threshold are all included, so the result can be larger than
    the nominal count and can even be the whole vertex set.
    """
    if isinstance(scores, np.ndarray):
        values = scores.astype(np.float64, copy=False)
    else:
        values = np.fromiter((scores[v] for v in g.vertices), dtype=np.float64, count=g.n_vertices)
    return frozenset(g.ids[sample_mask(values, rate)].tolist())


def _bfs_candidates(radj, v, t, depth, stop_at_t):
    """Vertices reachable from ``v`` in visit order, excluding ``v``.

    Stops before visiting a vertex deeper than ``depth`` once ``t`` candidates
    are collected. With ``stop_at_t`` it stops as soon as ``t`` are collected.
    """
    seen = {v}
    order = []
    frontier = [v]
    level = 0
    while frontier:
        level += 1
        nxt = []
        for x in frontier:
            for u in radj[x]:
                if u in seen:
                    continue
                if level > depth and len(order) >= t:
                    return order
                seen.add(u)
                order.append(u)
                if stop_at_t and len(order) == t:
                    return order
                nxt.append(u)
        frontier = nxt
    return order


def _jaccard(na, nb, inter):
    return 1.0 - inter / (na + nb - inter)


def condense_reference(g: DirectedGraph, removed: Iterable[int], cfg: CondenseConfig) -> DirectedGraph:
    """Straightforward per-vertex version of :func:`condense`.

    Slow, but each step mirrors the definition; kept as a cross-check.
    """
    removed = set(removed)
    adj = g.adjacency
    keep = [v for v in adj if v not in removed]
    radj = {v: tuple(u for u in adj[v] if u not in removed) for v in keep}
    t, depth, measure = cfg.t, cfg.depth, cfg.measure
    x = cfg.coords
    nplus = {v: frozenset(ns).union((v,)) for v, ns in radj.items()}
    new_out = {}
    for v in keep:
        cand = _bfs_candidates(radj, v, t, depth, False)
        if measure == "visit":
            scores = list(range(len(cand)))
        elif measure == "jaccard":
            a = nplus[v]
            scores = [_jaccard(len(a), len(nplus[u]), len(a & nplus[u])) for u in cand]
        else:
            scores = [float(squared_distances(x[v], x[u])) for u in cand]
        best = heapq.nsmallest(t, zip(scores, range(len(cand)), cand))
        new_out[v] = sorted(u for _, _, u in best)
    return DirectedGraph(new_out, validate=False)


class _LazyRows:
    """Python lists of CSR rows, converted on first access."""

    def __init__(self, indptr, indices):
        self.indptr = indptr
        self.indices = indices
        self.cache: dict[int, list[int]] = {}

    def __getitem__(self, i):
        row = self.cache.get(i)
        if row is None:
            row = self.indices[self.indptr[i]:self.indptr[i + 1]].tolist()
            self.cache[i] = row
        return row


class _Scorer:
    """Candidate scores for one condensing pass over the remaining graph ``h``."""

    def __init__(self, h: DirectedGraph, cfg: CondenseConfig):
        self.measure = cfg.measure
        self.h = h
        m = h.n_vertices
        if self.measure == "jaccard":
            a = h.to_scipy(np.int32) + identity(m, dtype=np.int32, format="csr")
            self.nplus = csr_matrix(a)
            self.nplus_t = self.nplus.T.tocsr()
            self.size = np.diff(self.nplus.indptr).astype(np.float64)
        elif self.measure == "euclidean":
            x = cfg.coords
            if x is None or x.shape[0] <= int(h.ids.max(initial=-1)):
                raise ConfigurationError("points do not cover every graph vertex")
            self.x = x[h.ids]

    def block(self, rows: np.ndarray, cand: np.ndarray, valid: np.ndarray) -> np.ndarray:
        """Scores for a (rows x width) block of local candidate indices."""
        if self.measure == "visit":
            return np.broadcast_to(np.arange(cand.shape[1], dtype=np.float64), cand.shape)
        safe = np.where(valid, cand, 0)
        if self.measure == "euclidean":
            return squared_distances(self.x[rows][:, None, :], self.x[safe])
        m = self.h.n_vertices
        q = (self.nplus[rows] @ self.nplus_t).tocsr()
        q.sort_indices()
        qrow = np.repeat(np.arange(rows.size), np.diff(q.indptr))
        keys = qrow * m + q.indices
        want = (np.arange(rows.size)[:, None] * m + safe).ravel()
        pos = np.minimum(np.searchsorted(keys, want), max(keys.size - 1, 0))
        found = keys[pos] == want if keys.size else np.zeros(want.size, bool)
        inter = np.where(found, q.data[pos] if keys.size else 0, 0).reshape(cand.shape)
        return _jaccard(self.size[rows][:, None], self.size[safe], inter.astype(np.float64))

    def single(self, v: int, cand: list[int]) -> np.ndarray:
        c = np.asarray(cand, dtype=np.int64)[None, :]
        return np.asarray(self.block(np.array([v]), c, np.ones(c.shape, bool)))[0]


def _two_hop_block(pad: np.ndarray, rows: np.ndarray, m: int):
    """Visit-ordered candidates within two hops for each row.

    Returns the candidates (padded with ``m``), the count at depth one and the
    count within depth two.
    """
    k = pad.shape[1]
    first = pad[rows]
    seq = np.concatenate([first, pad[first].reshape(rows.size, k * k)], axis=1)
    seq[seq == rows[:, None]] = m
    # value-then-position keys are distinct, so an unstable sort keeps visit order
    w = seq.shape[1]
    order = np.argsort(seq * w + np.arange(w), axis=1)
    ss = np.take_along_axis(seq, order, axis=1)
    fresh_sorted = np.ones(ss.shape, dtype=bool)
    fresh_sorted[:, 1:] = ss[:, 1:] != ss[:, :-1]
    fresh_sorted &= ss != m
    fresh = np.empty_like(fresh_sorted)
    np.put_along_axis(fresh, order, fresh_sorted, axis=1)
    n1 = fresh[:, :k].sum(axis=1)
    n2 = fresh.sum(axis=1)
    width = int(n2.max(initial=0))
    cand = np.full((rows.size, max(width, 1)), m, dtype=np.int64)
    col = np.cumsum(fresh, axis=1) - 1
    r, c = np.nonzero(fresh)
    cand[r, col[r, c]] = seq[r, c]
    return cand, n1, n2


def condense(g: DirectedGraph, removed: Iterable[int], cfg: CondenseConfig) -> DirectedGraph:
    """Drop ``removed`` and reconnect every remaining vertex to ``t`` candidates.

    Candidates come from a breadth-first search over the remaining vertices
    only, expanding neighbors in ascending id order. The search visits every
    vertex within ``depth`` hops and keeps going, one vertex at a time, until
    ``t`` are collected or nothing is reachable. Candidates are ranked by the
    configured measure (ties by visit order) and the best ``min(|C|, t)``
    become the new out-neighbors.
    """
    mask = removed if isinstance(removed, np.ndarray) and removed.dtype == bool else local_mask(g, removed)
    if mask.all():
        raise InvalidParameter("condensing needs at least one remaining vertex")
    h = subgraph_mask(g, ~mask) if mask.any() else g
    return _condense_remaining(h, cfg)


def _condense_remaining(h: DirectedGraph, cfg: CondenseConfig) -> DirectedGraph:
    t, depth = cfg.t, cfg.depth
    m = h.n_vertices
    scorer = _Scorer(h, cfg)
    deg = h.out_degrees()
    k = int(deg.max(initial=0))
    out = np.full((m, t), -1, dtype=np.int64)

    if depth <= 2 and k > 0:
        pad = np.full((m + 1, k), m, dtype=np.int64)
        src = np.repeat(np.arange(m), deg)
        pad[src, np.arange(h.indices.size) - h.indptr[src]] = h.indices
        step = max(1, _BLOCK_CELLS // (k + k * k) // (1 if cfg.measure != "euclidean" else max(1, scorer.x.shape[1] // 4)))
        slow = []
        for start in range(0, m, step):
            rows = np.arange(start, min(m, start + step))
            cand, n1, n2 = _two_hop_block(pad, rows, m)
            within = {0: np.zeros_like(n1), 1: n1, 2: n2}[depth]
            need = np.maximum(within, t)
            ok = n2 >= need
            slow.extend(rows[~ok].tolist())
            if not ok.any():
                continue
            rows, cand, need = rows[ok], cand[ok], need[ok]
            width = int(need.max())
            cand = cand[:, :width]
            if cfg.measure == "visit":
                # visit order is the column order
                out[rows] = np.sort(cand[:, :t], axis=1)
                continue
            valid = np.arange(width)[None, :] < need[:, None]
            score = np.where(valid, scorer.block(rows, cand, valid), np.inf)
            pick = np.argsort(score, axis=1, kind="stable")[:, :t]
            out[rows] = np.sort(np.take_along_axis(cand, pick, axis=1), axis=1)
    else:
        slow = range(m)

    stop_at_t = cfg.measure == "visit"
    radj = _LazyRows(h.indptr, h.indices)
    for v in slow:
        cand = _bfs_candidates(radj, v, t, depth, stop_at_t)
        if len(cand) > t:
            score = scorer.single(v, cand)
            pick = np.argsort(score, kind="stable")[:t]
            cand = [cand[i] for i in pick]
        out[v, :len(cand)] = sorted(cand)

    filled = out >= 0
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(filled.sum(axis=1), out=indptr[1:])
    return DirectedGraph.from_csr(h.ids, indptr, out[filled])


def jaccard_dissimilarity(g: DirectedGraph, v: int, u: int) -> float:
    """``1 - |N+(v) & N+(u)| / |N+(v) | N+(u)|`` with ``N+(x)`` = out-list plus ``x``."""
    a = set(g.out(v)) | {v}
    b = set(g.out(u)) | {u}
    return 1.0 - len(a & b) / len(a | b)
