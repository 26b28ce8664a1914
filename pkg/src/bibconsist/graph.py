"""Immutable simple graphs in compressed sparse row form.

Node ids are dense integers ``0..node_count-1``. Directed graphs keep an
out-neighbor index and its exact transpose; undirected graphs store every
link in both endpoint rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


class GraphError(ValueError):
    pass


class EmptyGraphError(GraphError):
    pass


class SelfLoopError(GraphError):
    def __init__(self, pair):
        self.pair = (int(pair[0]), int(pair[1]))
        super().__init__(f"self-loop {self.pair} not allowed in this network")


def _csr(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    indices = dst[order].astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, indices


@dataclass(frozen=True, eq=False)
class Graph:
    node_count: int
    directed: bool
    indptr: np.ndarray
    indices: np.ndarray
    in_indptr: np.ndarray | None = None
    in_indices: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.in_indptr, self.in_indices):
            if arr is not None:
                arr.flags.writeable = False

    @property
    def link_count(self) -> int:
        """Number of distinct links (self-loops included)."""
        if self.directed:
            return int(self.indices.size)
        return int(self.indices.size // 2)

    @property
    def self_loops(self) -> np.ndarray:
        src = self.sources()
        flags = np.zeros(self.node_count, dtype=bool)
        flags[src[src == self.indices]] = True
        return flags

    def sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.indptr))

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def predecessors(self, u: int) -> np.ndarray:
        if not self.directed:
            return self.neighbors(u)
        return self.in_indices[self.in_indptr[u]:self.in_indptr[u + 1]]

    def links(self) -> tuple[np.ndarray, np.ndarray]:
        """Link endpoint arrays; undirected links are reported once with ``u <= v``."""
        src = self.sources()
        dst = self.indices
        if not self.directed:
            keep = src <= dst
            return src[keep], dst[keep]
        return src, dst

    def out_degree(self, loops: bool = True) -> np.ndarray:
        deg = np.diff(self.indptr)
        if not loops:
            deg = deg - self.self_loops
        return deg

    def in_degree(self, loops: bool = True) -> np.ndarray:
        if not self.directed:
            return self.out_degree(loops)
        deg = np.diff(self.in_indptr)
        if not loops:
            deg = deg - self.self_loops
        return deg

    def degree(self, loops: bool = True) -> np.ndarray:
        """Total degree; ``k_in + k_out`` for directed graphs."""
        if self.directed:
            return self.in_degree(loops) + self.out_degree(loops)
        return self.out_degree(loops)

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr),
                             shape=(self.node_count, self.node_count))

    def subgraph(self, nodes: Sequence[int]) -> "Graph":
        """Induced subgraph; node ``nodes[i]`` becomes node ``i``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        starts = self.indptr[nodes]
        lengths = self.indptr[nodes + 1] - starts
        offsets = np.cumsum(lengths) - lengths
        pos = np.arange(lengths.sum()) - np.repeat(offsets - starts, lengths)
        src = np.repeat(np.arange(nodes.size), lengths)
        dst = remap[self.indices[pos]]
        keep = dst >= 0
        if not self.directed:
            keep &= src <= dst
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in nodes)
        return _from_unique(src[keep], dst[keep], nodes.size, self.directed, labels)


def _from_unique(src, dst, n, directed, labels=None) -> Graph:
    if directed:
        indptr, indices = _csr(src, dst, n)
        in_indptr, in_indices = _csr(dst, src, n)
        return Graph(n, True, indptr, indices, in_indptr, in_indices, labels)
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    indptr, indices = _csr(both_src, both_dst, n)
    return Graph(n, False, indptr, indices, labels=labels)


def build_graph(links, directed: bool, allow_self_loops: bool = False,
                node_count: int | None = None, labels=None) -> Graph:
    """Build a simple graph from ``(source, target)`` pairs.

    Duplicate links collapse; undirected pairs are stored once regardless of
    orientation. ``node_count`` may exceed the largest id to keep isolated
    nodes.
    """
    arr = np.asarray(links, dtype=np.int64)
    if arr.size == 0:
        raise EmptyGraphError("no links: nothing to analyze")
    arr = arr.reshape(-1, 2)
    if arr.min() < 0:
        raise GraphError("node ids must be non-negative")
    src, dst = arr[:, 0], arr[:, 1]
    loops = src == dst
    if loops.any() and not (allow_self_loops and directed):
        raise SelfLoopError(arr[np.argmax(loops)])
    n = int(arr.max()) + 1
    if node_count is not None:
        if node_count < n:
            raise GraphError(f"node_count {node_count} smaller than max id + 1 ({n})")
        n = node_count
    if not directed:
        src, dst = np.minimum(src, dst), np.maximum(src, dst)
    key = np.unique(src * n + dst)
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise GraphError("labels must name every node")
    return _from_unique(key // n, key % n, n, directed, labels)


def largest_wcc(g: Graph) -> tuple[np.ndarray, float]:
    """Nodes of the largest weakly connected component and its node fraction."""
    if g.node_count == 0:
        raise EmptyGraphError("empty graph")
    _, labels = csgraph.connected_components(g.adjacency(), directed=g.directed,
                                             connection="weak")
    sizes = np.bincount(labels)
    nodes = np.flatnonzero(labels == np.argmax(sizes))
    return nodes, nodes.size / g.node_count


@dataclass(frozen=True)
class BowTie:
    wcc_fraction: float
    in_fraction: float
    core_fraction: float
    out_fraction: float
    mode: str = "degree"


def bow_tie(g: Graph, mode: str = "degree") -> BowTie:
    """Fractions of never-cited (in), citing-and-cited (core) and non-citing
    (out) nodes in the largest WCC, relative to all nodes.

    ``mode="scc"`` takes the largest strongly connected component as core,
    its ancestors as in and its descendants as out; tendrils are left out so
    the three fractions need not add up to the WCC fraction.
    """
    if not g.directed:
        raise GraphError("bow-tie decomposition needs a directed graph")
    wcc, wcc_fraction = largest_wcc(g)
    n = g.node_count
    if mode == "degree":
        k_in = g.in_degree(loops=False)[wcc]
        k_out = g.out_degree(loops=False)[wcc]
        n_in = int(np.count_nonzero(k_in == 0))
        n_out = int(np.count_nonzero((k_out == 0) & (k_in > 0)))
        n_core = wcc.size - n_in - n_out
        return BowTie(wcc_fraction, n_in / n, n_core / n, n_out / n, mode)
    if mode == "scc":
        adj = g.adjacency()
        _, labels = csgraph.connected_components(adj, directed=True, connection="strong")
        core = np.flatnonzero(labels == np.argmax(np.bincount(labels)))
        down = _reachable(adj, core)
        up = _reachable(adj.T.tocsr(), core)
        n_core = core.size
        return BowTie(wcc_fraction, (up.sum() - n_core) / n, n_core / n,
                      (down.sum() - n_core) / n, mode)
    raise ValueError(f"unknown bow-tie mode {mode!r}")


def _reachable(adj: sp.csr_matrix, start: np.ndarray) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    frontier = start
    while frontier.size:
        nxt = np.unique(adj[frontier].indices)
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def undirected_view(g: Graph) -> Graph:
    """Drop directions and self-loops; reciprocal pairs become one link."""
    if not g.directed:
        return g
    src, dst = g.links()
    keep = src != dst
    if not keep.any():
        raise EmptyGraphError("graph has no links besides self-loops")
    return build_graph(np.column_stack([src[keep], dst[keep]]), directed=False,
                       node_count=g.node_count, labels=g.labels)


def read_edgelist(stream: TextIO | Iterable[str]) -> np.ndarray:
    """Whitespace separated integer pairs; ``#`` lines are comments."""
    pairs = []
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split()[:2]
        pairs.append((int(a), int(b)))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def write_edgelist(g: Graph, stream: TextIO) -> None:
    src, dst = g.links()
    for u, v in zip(src.tolist(), dst.tolist()):
        stream.write(f"{u} {v}\n")
