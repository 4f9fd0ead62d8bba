"""Graph separability measures and external clustering scores."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import maximum_flow
from scipy.special import gammaln

from .errors import InvalidInput, InvalidParameter, UndefinedRatio
from .graph import DirectedGraph, local_mask


def _positive_mask(g: DirectedGraph, truth) -> np.ndarray:
    truth = np.asarray(truth)
    lab = truth[g.ids]
    src = np.repeat(np.arange(g.n_vertices), g.out_degrees())
    bad = lab[src] != lab[g.indices]
    return np.bincount(src[bad], minlength=g.n_vertices) == 0


def positive_vertices(g: DirectedGraph, truth) -> dict[int, bool]:
    """A vertex is positive when every out-neighbor shares its true label."""
    return dict(zip(g.vertices, _positive_mask(g, truth).tolist()))


def vertex_positivity(g: DirectedGraph, truth) -> float:
    if g.n_vertices == 0:
        raise UndefinedRatio("vertex positivity of an empty graph")
    return float(_positive_mask(g, truth).mean())


def positivity_after_removal(g: DirectedGraph, truth, removed: Iterable[int]) -> float:
    """Share of positive vertices among the survivors, with positivity judged
    on ``g`` before anything is removed."""
    mask = local_mask(g, removed)
    kept = _positive_mask(g, truth)[~mask]
    if kept.size == 0:
        raise UndefinedRatio("every vertex was removed")
    return float(kept.mean())


def edge_positivity(g: DirectedGraph, truth) -> float:
    if g.n_edges == 0:
        raise UndefinedRatio("edge positivity of an edgeless graph")
    lab = np.asarray(truth)[g.ids]
    src = np.repeat(np.arange(g.n_vertices), g.out_degrees())
    return float(np.mean(lab[src] == lab[g.indices]))


def graph_connectivity(g: DirectedGraph) -> float:
    """Mean unit-capacity max-flow over all ordered pairs of distinct vertices.

    Dividing by ``|V|(|V|-1)`` makes this the unordered-pair average for
    graphs that are symmetric under edge reversal.
    """
    n = g.n_vertices
    if n < 2:
        raise InvalidParameter("connectivity needs at least two vertices")
    if g.n_edges == 0:
        return 0.0
    cap = g.to_scipy(np.int32)
    outdeg = np.diff(cap.indptr)
    indeg = np.bincount(cap.indices, minlength=n)
    total = 0
    for s in range(n):
        if outdeg[s] == 0:
            continue
        for t in range(n):
            if t == s or indeg[t] == 0:
                continue
            total += maximum_flow(cap, s, t, method="edmonds_karp").flow_value
    return float(total) / (n * (n - 1))


# --- external validation -------------------------------------------------


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray

    @classmethod
    def from_labels(cls, a, b) -> "ContingencyTable":
        a = np.asarray(a).ravel()
        b = np.asarray(b).ravel()
        if a.size != b.size:
            raise InvalidInput(f"labelings differ in length: {a.size} vs {b.size}")
        if a.size == 0:
            raise InvalidInput("labelings are empty")
        _, ia = np.unique(a, return_inverse=True)
        _, ib = np.unique(b, return_inverse=True)
        counts = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
        np.add.at(counts, (ia.ravel(), ib.ravel()), 1)
        return cls(counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def rows(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cols(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _entropy(marginal: np.ndarray, n: int) -> float:
    p = marginal[marginal > 0] / n
    return float(-(p * np.log(p)).sum())


def mutual_information(table: ContingencyTable) -> float:
    c = table.counts
    n = table.n
    nz = c > 0
    outer = np.outer(table.rows, table.cols)[nz]
    nij = c[nz]
    return float(max(0.0, (nij / n * (np.log(nij) + np.log(n) - np.log(outer))).sum()))


def expected_mutual_information(table: ContingencyTable) -> float:
    """Expected mutual information of two labelings with these marginals under
    random permutation (hypergeometric cell counts)."""
    a = table.rows.astype(np.int64)
    b = table.cols.astype(np.int64)
    n = table.n
    lg_a, lg_b = gammaln(a + 1), gammaln(b + 1)
    lg_na, lg_nb = gammaln(n - a + 1), gammaln(n - b + 1)
    lg_n = gammaln(n + 1)
    emi = 0.0
    for i in range(a.size):
        for j in range(b.size):
            lo = max(1, a[i] + b[j] - n)
            hi = min(a[i], b[j])
            if hi < lo:
                continue
            nij = np.arange(lo, hi + 1, dtype=np.float64)
            term = nij / n * (np.log(n * nij) - np.log(a[i] * b[j]))
            log_p = (
                lg_a[i] + lg_b[j] + lg_na[i] + lg_nb[j] - lg_n
                - gammaln(nij + 1)
                - gammaln(a[i] - nij + 1)
                - gammaln(b[j] - nij + 1)
                - gammaln(n - a[i] - b[j] + nij + 1)
            )
            emi += float((term * np.exp(log_p)).sum())
    return emi


def _same_partition(table: ContingencyTable) -> bool:
    c = table.counts
    return c.shape[0] == c.shape[1] and np.count_nonzero(c) == c.shape[0]


def nmi(a, b, normalization: str = "max") -> float:
    """Normalized mutual information with natural-log entropies."""
    if normalization not in ("max", "sqrt"):
        raise InvalidParameter(f"unknown normalization {normalization!r}")
    table = ContingencyTable.from_labels(a, b)
    n = table.n
    ha, hb = _entropy(table.rows, n), _entropy(table.cols, n)
    if _same_partition(table):
        return 1.0
    mi = mutual_information(table)
    norm = max(ha, hb) if normalization == "max" else np.sqrt(ha * hb)
    if norm == 0:
        return 0.0
    return float(min(1.0, mi / norm))


def ami(a, b) -> float:
    """Adjusted mutual information with the max-entropy normalizer."""
    table = ContingencyTable.from_labels(a, b)
    if _same_partition(table):
        return 1.0
    n = table.n
    ha, hb = _entropy(table.rows, n), _entropy(table.cols, n)
    mi = mutual_information(table)
    emi = expected_mutual_information(table)
    denom = max(ha, hb) - emi
    if abs(mi - emi) <= 1e-15 * max(1.0, abs(mi)):
        return 0.0
    if denom == 0:
        return 0.0
    return float((mi - emi) / denom)
