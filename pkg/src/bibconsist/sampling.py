"""Random-walk network samples for visualization.

A walker moves on the undirected view of the largest weakly connected
component; with probability ``restart`` per step, or at a dead end, it jumps
back to a uniformly chosen node it has already visited. The sample is the
subgraph induced by the first ``size`` distinct visited nodes, with the
original link directions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, largest_wcc, undirected_view

RESTART = 0.15
_MAX_STEPS_PER_NODE = 10_000


@dataclass(frozen=True)
class Sample:
    node_ids: tuple[int, ...]
    induced_links: tuple[tuple[int, int], ...]
    ks: float
    seed: int
    truncated: bool = False
    index: int = 0

    @property
    def size(self) -> int:
        return len(self.node_ids)


def ks_distance(a, b) -> float:
    """Largest absolute gap between the empirical CDFs of two samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS distance needs two non-empty samples")
    grid = np.union1d(a, b)
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


class _Walker:
    def __init__(self, g: Graph):
        u = undirected_view(g)
        self.graph = g
        self.indptr = u.indptr.tolist()
        self.indices = u.indices.tolist()
        self.wcc = largest_wcc(u)[0]
        if self.wcc.size < 2:
            raise GraphError("largest component has fewer than two nodes")
        self.full_degrees = g.degree()

    def walk(self, size: int, seed: int) -> tuple[list[int], bool]:
        if self.wcc.size <= size:
            return sorted(self.wcc.tolist()), self.wcc.size < size
        rng = np.random.default_rng(seed)
        indptr, indices = self.indptr, self.indices
        current = int(self.wcc[rng.integers(self.wcc.size)])
        visited = [current]
        seen = {current}
        steps = 0
        while len(visited) < size:
            coins = rng.random(1024)
            picks = rng.random(1024)
            for coin, pick in zip(coins.tolist(), picks.tolist()):
                lo, hi = indptr[current], indptr[current + 1]
                if coin < RESTART or hi == lo:
                    current = visited[int(pick * len(visited))]
                    continue
                current = indices[lo + int(pick * (hi - lo))]
                if current not in seen:
                    seen.add(current)
                    visited.append(current)
                    if len(visited) == size:
                        break
            steps += 1024
            if steps > _MAX_STEPS_PER_NODE * size:
                raise RuntimeError("random walk failed to reach the requested size")
        return visited, False

    def sample(self, size: int, seed: int, index: int = 0) -> Sample:
        nodes, truncated = self.walk(size, seed)
        nodes = np.sort(np.asarray(nodes, dtype=np.int64))
        sub = self.graph.subgraph(nodes)
        src, dst = sub.links()
        links = tuple(zip(nodes[src].tolist(), nodes[dst].tolist()))
        ks = ks_distance(sub.degree(), self.full_degrees)
        return Sample(tuple(nodes.tolist()), links, ks, seed, truncated, index)


def random_walk_sample(g: Graph, size: int = 250, seed: int = 42) -> Sample:
    return _Walker(g).sample(size, seed)


def best_sample(g: Graph, n_samples: int = 5000, size: int = 250, seed: int = 42,
                return_scores: bool = False):
    """Draw ``n_samples`` walks (sample ``i`` seeded with ``seed + i``) and keep
    the one whose degree distribution is KS-closest to the full network's."""
    walker = _Walker(g)
    best = None
    scores = np.empty(n_samples)
    for i in range(n_samples):
        s = walker.sample(size, seed + i, index=i)
        scores[i] = s.ks
        if best is None or s.ks < best.ks:
            best = s
        if s.truncated or walker.wcc.size <= size:
            # every walk returns the whole component
            scores[i + 1:] = s.ks
            break
    if return_scores:
        return best, scores
    return best
