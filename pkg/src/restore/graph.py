"""Directed unweighted graphs: construction, k-hop ego extraction, stats, diffs.

Graphs are immutable after construction and safe to share across workers.
Adjacency is stored CSR-style in both directions with sorted rows, so
neighbor lookups can binary-search and kernels can consume the raw arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class NodeId(NamedTuple):
    label: str
    index: int


@dataclass
class GraphStats:
    node_count: int
    edge_count: int
    out_degree_min: int
    out_degree_avg: float
    out_degree_max: int
    in_degree_min: int
    in_degree_avg: float
    in_degree_max: int


@dataclass
class GraphDiff:
    """Added/missing nodes and edges of a reconstructed graph vs the original."""

    added_nodes: int
    missing_nodes: int
    added_edges: int
    missing_edges: int
    added_edge_list: list[tuple[str, str]] = field(default_factory=list)
    missing_edge_list: list[tuple[str, str]] = field(default_factory=list)


def _build_csr(n: int, pairs: np.ndarray, by_src: bool) -> tuple[np.ndarray, np.ndarray]:
    """CSR arrays from an (m, 2) index-pair array; rows come out sorted."""
    indptr = np.zeros(n + 1, dtype=np.int64)
    if pairs.shape[0] == 0:
        return indptr, np.zeros(0, dtype=np.int64)
    key, val = (pairs[:, 0], pairs[:, 1]) if by_src else (pairs[:, 1], pairs[:, 0])
    order = np.lexsort((val, key))
    key, val = key[order], val[order]
    counts = np.bincount(key, minlength=n)
    indptr[1:] = np.cumsum(counts)
    return indptr, val.astype(np.int64, copy=True)


class DiGraph:
    """Directed, unweighted graph with a bijective label/index mapping.

    Use :func:`build_graph` for the public construction path; the raw
    constructor trusts its inputs and also admits empty graphs, which the
    reconstruction diff needs.
    """

    __slots__ = ("_labels", "_index", "out_indptr", "out_indices", "in_indptr", "in_indices")

    def __init__(self, labels: Sequence[str], edge_pairs: np.ndarray):
        self._labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise ValueError("duplicate node labels")
        n = len(self._labels)
        pairs = np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2)
        self.out_indptr, self.out_indices = _build_csr(n, pairs, by_src=True)
        self.in_indptr, self.in_indices = _build_csr(n, pairs, by_src=False)

    # -- basic shape -------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def edge_count(self) -> int:
        return int(self.out_indices.shape[0])

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def node_ids(self) -> Iterator[NodeId]:
        for i, lab in enumerate(self._labels):
            yield NodeId(lab, i)

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown node label: {label!r}") from None

    def has_label(self, label: str) -> bool:
        return label in self._index

    def label_of(self, index: int) -> str:
        return self._labels[index]

    # -- adjacency ---------------------------------------------------

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[i]:self.in_indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        row = self.out_neighbors(i)
        pos = np.searchsorted(row, j)
        return bool(pos < row.shape[0] and row[pos] == j)

    def edges(self) -> Iterator[tuple[int, int]]:
        for i in range(self.node_count):
            for j in self.out_neighbors(i):
                yield i, int(j)

    def edge_label_pairs(self) -> list[tuple[str, str]]:
        return [(self._labels[i], self._labels[j]) for i, j in self.edges()]

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency, row i = out-edges of node i."""
        n = self.node_count
        a = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            a[i, self.out_neighbors(i)] = 1.0
        return a


def build_graph(edges: Iterable[tuple[str, str]]) -> DiGraph:
    """Build a deduplicated directed graph from (src, dst) label pairs.

    Indices are assigned in first-seen order; self-loops are dropped because
    reconstruction never scores the diagonal.
    """
    labels: list[str] = []
    index: dict[str, int] = {}
    pair_set: set[tuple[int, int]] = set()

    def intern(label: str) -> int:
        if not isinstance(label, str) or not label:
            raise ValueError(f"node labels must be non-empty text, got {label!r}")
        got = index.get(label)
        if got is None:
            got = len(labels)
            index[label] = got
            labels.append(label)
        return got

    for src, dst in edges:
        i, j = intern(src), intern(dst)
        if i != j:
            pair_set.add((i, j))
    if not labels:
        raise ValueError("empty graph")
    pairs = np.array(sorted(pair_set), dtype=np.int64).reshape(-1, 2)
    return DiGraph(labels, pairs)


def graph_from_labeled_edges(
    edges: Iterable[tuple[str, str]], extra_nodes: Iterable[str] = ()
) -> DiGraph:
    """Like build_graph but admits isolated nodes and an empty edge set."""
    labels: list[str] = []
    index: dict[str, int] = {}

    def intern(label: str) -> int:
        got = index.get(label)
        if got is None:
            got = len(labels)
            index[label] = got
            labels.append(label)
        return got

    pair_set: set[tuple[int, int]] = set()
    for src, dst in edges:
        i, j = intern(src), intern(dst)
        if i != j:
            pair_set.add((i, j))
    for label in extra_nodes:
        intern(label)
    pairs = np.array(sorted(pair_set), dtype=np.int64).reshape(-1, 2)
    return DiGraph(labels, pairs)


def khop_ego_subgraph(g: DiGraph, center: str | NodeId, hops: int) -> DiGraph:
    """Induced subgraph over nodes within `hops` undirected steps of center.

    Expansion ignores edge direction (both in- and out-neighbors count as one
    step) but the retained edges keep their direction; the edge set is every
    original edge whose endpoints both fall inside the node set.
    """
    if hops < 1:
        raise ValueError("hops must be >= 1")
    label = center.label if isinstance(center, NodeId) else center
    c = g.index_of(label)

    seen = {c}
    frontier = {c}
    for _ in range(hops):
        nxt: set[int] = set()
        for u in frontier:
            nxt.update(int(v) for v in g.out_neighbors(u))
            nxt.update(int(v) for v in g.in_neighbors(u))
        nxt -= seen
        if not nxt:
            break
        seen |= nxt
        frontier = nxt

    keep = sorted(seen)
    remap = {old: new for new, old in enumerate(keep)}
    labels = [g.label_of(i) for i in keep]
    pairs = [
        (remap[i], remap[int(j)])
        for i in keep
        for j in g.out_neighbors(i)
        if int(j) in remap
    ]
    return DiGraph(labels, np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2))


def graph_stats(g: DiGraph) -> GraphStats:
    n = g.node_count
    out_deg = np.diff(g.out_indptr)
    in_deg = np.diff(g.in_indptr)
    return GraphStats(
        node_count=n,
        edge_count=g.edge_count,
        out_degree_min=int(out_deg.min()) if n else 0,
        out_degree_avg=float(out_deg.mean()) if n else 0.0,
        out_degree_max=int(out_deg.max()) if n else 0,
        in_degree_min=int(in_deg.min()) if n else 0,
        in_degree_avg=float(in_deg.mean()) if n else 0.0,
        in_degree_max=int(in_deg.max()) if n else 0,
    )


def graph_diff(original: DiGraph, reconstructed: DiGraph) -> GraphDiff:
    """Added = present only in reconstructed; missing = present only in original.

    A node counts as missing when the reconstruction emits no edge touching it
    (it is absent from the reconstructed node set).
    """
    orig_nodes = set(original.labels)
    recon_nodes = set(reconstructed.labels)
    orig_edges = set(original.edge_label_pairs())
    recon_edges = set(reconstructed.edge_label_pairs())
    added_edges = sorted(recon_edges - orig_edges)
    missing_edges = sorted(orig_edges - recon_edges)
    return GraphDiff(
        added_nodes=len(recon_nodes - orig_nodes),
        missing_nodes=len(orig_nodes - recon_nodes),
        added_edges=len(added_edges),
        missing_edges=len(missing_edges),
        added_edge_list=added_edges,
        missing_edge_list=missing_edges,
    )


def gen_synthetic(kind: str, n: int, seed: int) -> DiGraph:
    """Deterministic synthetic graphs: path, cycle, star, erdos, scale_free."""
    if n < 1:
        raise ValueError("n must be >= 1")
    labels = [f"n{i}" for i in range(n)]
    if kind == "path":
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        pairs = [(i, (i + 1) % n) for i in range(n)] if n > 1 else []
    elif kind == "star":
        pairs = [(0, i) for i in range(1, n)]
    elif kind == "erdos":
        rng = np.random.default_rng(seed)
        p = min(1.0, 4.0 / max(1, n - 1))
        mask = rng.random((n, n)) < p
        np.fill_diagonal(mask, False)
        pairs = [(int(i), int(j)) for i, j in np.argwhere(mask)]
    elif kind == "scale_free":
        # Preferential attachment: each new node sends 3 edges toward existing
        # nodes sampled by degree, seeded by a small cycle so every node keeps
        # a positive out-degree. m=3 keeps 1-hop neighborhoods denser than
        # bare stars, which distance-based scorers need.
        rng = np.random.default_rng(seed)
        m = 3
        core = m + 1
        if n <= core:
            pairs = [(i, (i + 1) % n) for i in range(n)] if n > 1 else []
        else:
            pairs = [(i, (i + 1) % core) for i in range(core)]
            degree = np.zeros(n, dtype=np.float64)
            degree[:core] = 2.0
            for v in range(core, n):
                weights = degree[:v] + 1.0
                probs = weights / weights.sum()
                targets = rng.choice(v, size=min(m, v), replace=False, p=probs)
                for t in targets:
                    pairs.append((v, int(t)))
                    degree[v] += 1.0
                    degree[t] += 1.0
    else:
        raise ValueError(f"unknown synthetic kind: {kind!r}")
    pairs = sorted(set((i, j) for i, j in pairs if i != j))
    return DiGraph(labels, np.array(pairs, dtype=np.int64).reshape(-1, 2))
