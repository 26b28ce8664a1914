"""Hop plots: exact all-pairs BFS and the approximate neighborhood function.

ANF keeps, per node, ``trials`` Flajolet-Martin bitmasks per realization.
After ``h`` rounds of OR-ing neighbor masks, a node's masks sketch the set of
nodes within ``h`` hops; the lowest unset bit ``b`` averaged over trials gives
the size estimate ``2**mean(b) / 0.77351``. That estimate overshoots by
about half an item even asymptotically and by far more for the handful of
nodes seen in the first hops, so counts up to ``EXACT_LIMIT`` are instead
recovered by inverting the exact expectation of ``b``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np
from scipy.sparse import csgraph
from scipy.stats import binom

from ..graph import Graph, undirected_view

FM_CORRECTION = 0.77351
EXACT_LIMIT = 1024
_BATCH_BYTES = 64 * 2**20


class FragmentedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class HopPlot:
    """Fraction ``H[i]`` of reachable ordered node pairs within ``delta[i]`` hops."""
    delta: np.ndarray
    H: np.ndarray
    realizations: int = 0
    trials: int = 0

    def rows(self):
        return zip(self.delta.tolist(), self.H.tolist())


@numba.njit(cache=True)
def _or_step(indptr, indices, cur, nxt):
    n, w = cur.shape
    changed = False
    for u in range(n):
        for j in range(w):
            nxt[u, j] = cur[u, j]
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            for j in range(w):
                nxt[u, j] |= cur[v, j]
        if not changed:
            for j in range(w):
                if nxt[u, j] != cur[u, j]:
                    changed = True
                    break
    return changed


@numba.njit(cache=True)
def _mean_lowest_zero(masks, realizations, trials):
    n = masks.shape[0]
    out = np.empty((realizations, n))
    for r in range(realizations):
        for u in range(n):
            s = 0
            for t in range(trials):
                x = masks[u, r * trials + t]
                b = 0
                while b < 64 and (x >> np.uint64(b)) & np.uint64(1):
                    b += 1
                s += b
            out[r, u] = s / trials
    return out


@lru_cache(maxsize=1)
def _expected_bit_table() -> np.ndarray:
    """E[lowest zero bit | c distinct items] for c = 0..EXACT_LIMIT.

    An item sets bit 0 with probability 1/2 and otherwise falls into the same
    geometric law shifted by one bit, so the probability that c items cover
    bits 0..r-1 obeys Q(r, c) = sum_j binom(c, j) 2**-c Q(r - 1, c - j), j >= 1.
    """
    size = EXACT_LIMIT + 1
    step = np.zeros((size, size))
    for c in range(1, size):
        j = np.arange(1, c + 1)
        step[c, c - j] = binom.pmf(j, c, 0.5)
    cover = np.ones(size)
    expected = np.zeros(size)
    for _ in range(64):
        cover = step @ cover
        expected += cover
    return expected


def estimate_counts(mean_bits: np.ndarray) -> np.ndarray:
    """Invert mean lowest-zero-bit values into neighborhood size estimates."""
    table = _expected_bit_table()
    counts = np.interp(mean_bits, table, np.arange(table.size, dtype=float))
    large = mean_bits > table[-1]
    counts[large] = 2.0 ** mean_bits[large] / FM_CORRECTION - 0.5
    return counts


def _estimate(masks, realizations, trials):
    return estimate_counts(_mean_lowest_zero(masks, realizations, trials)).sum(axis=1)


def _init_masks(n, first, count, trials, seed):
    masks = np.empty((n, count * trials), dtype=np.uint64)
    for r in range(count):
        rng = np.random.default_rng([seed, first + r])
        bits = np.minimum(rng.geometric(0.5, size=(n, trials)) - 1, 63).astype(np.uint64)
        masks[:, r * trials:(r + 1) * trials] = np.left_shift(np.uint64(1), bits)
    return masks


def _anf_counts(u: Graph, realizations, trials, seed) -> list[np.ndarray]:
    n = u.node_count
    per = max(1, min(realizations, _BATCH_BYTES // max(1, n * trials * 8)))
    indptr = u.indptr.astype(np.int64)
    indices = u.indices.astype(np.int64)
    curves = []
    for first in range(0, realizations, per):
        count = min(per, realizations - first)
        cur = _init_masks(n, first, count, trials, seed)
        nxt = np.empty_like(cur)
        history = [_estimate(cur, count, trials)]
        while _or_step(indptr, indices, cur, nxt):
            cur, nxt = nxt, cur
            history.append(_estimate(cur, count, trials))
        curves.extend(np.array(history).T)
    return curves


def hop_plot_anf(g: Graph, realizations: int = 100, trials: int = 32, seed: int = 42) -> HopPlot:
    """ANF estimate of the hop plot on the undirected view, averaged over realizations."""
    u = undirected_view(g)
    curves = _anf_counts(u, realizations, trials, seed)
    length = max(c.size for c in curves)
    H = np.zeros(length)
    for c in curves:
        reach = c[-1] - c[0]
        h = (c - c[0]) / reach if reach > 0 else np.ones(c.size)
        H += np.concatenate([h, np.full(length - c.size, h[-1])])
    H /= len(curves)
    H = np.clip(np.maximum.accumulate(H), 0.0, 1.0)
    return HopPlot(np.arange(length), H, realizations, trials)


def hop_plot_exact(g: Graph) -> HopPlot:
    """Exact hop plot from all-pairs BFS; quadratic memory, small graphs only."""
    u = undirected_view(g)
    dist = csgraph.shortest_path(u.adjacency(), method="D", unweighted=True)
    finite = dist[np.isfinite(dist) & (dist > 0)].astype(np.int64)
    if finite.size == 0:
        return HopPlot(np.array([0]), np.array([1.0]))
    counts = np.bincount(finite)
    H = np.cumsum(counts) / finite.size
    return HopPlot(np.arange(counts.size), H)


def effective_diameter(h: HopPlot, q: float = 0.9) -> float:
    """Smallest hop count at which the linearly interpolated hop plot reaches ``q``."""
    delta = np.asarray(h.delta, dtype=float)
    H = np.asarray(h.H, dtype=float)
    if delta[0] > 0:
        delta = np.concatenate([[0.0], delta])
        H = np.concatenate([[0.0], H])
    if H[-1] < q:
        raise FragmentedGraphError(f"hop plot saturates at {H[-1]:.3f} < {q}")
    i = int(np.argmax(H >= q))
    if i == 0:
        return float(delta[0])
    return float(delta[i - 1] + (q - H[i - 1]) / (H[i] - H[i - 1]) * (delta[i] - delta[i - 1]))
