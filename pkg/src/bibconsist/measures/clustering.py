from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph, undirected_view
from .degree import link_pairs, pearson

_CHUNK = 4096


@dataclass(frozen=True)
class Clustering:
    """Per-node clustering coefficients on the undirected view.

    ``t`` is the number of links among a node's neighbors and ``omega`` the
    degree-feasible maximum of that number.
    """
    c: np.ndarray
    b: np.ndarray
    d: np.ndarray
    t: np.ndarray
    omega: np.ndarray
    k: np.ndarray

    def variant(self, name: str) -> np.ndarray:
        if name not in ("c", "b", "d"):
            raise ValueError(f"unknown clustering variant {name!r}")
        return getattr(self, name)


def triangle_counts(g: Graph) -> np.ndarray:
    """Links among the neighbors of each node of an undirected graph."""
    adj = g.adjacency().astype(np.int64)
    t = np.empty(g.node_count, dtype=np.int64)
    for lo in range(0, g.node_count, _CHUNK):
        rows = adj[lo:lo + _CHUNK]
        t[lo:lo + _CHUNK] = np.asarray((rows @ adj).multiply(rows).sum(axis=1)).ravel()
    return t // 2


def clustering_coefficients(g: Graph) -> Clustering:
    u = undirected_view(g)
    k = u.degree()
    t = triangle_counts(u)
    n = u.node_count
    delta = k.max() if n else 0
    ok = k > 1

    # single divisions of exact integers keep results correctly rounded
    c = np.divide(2 * t, k * (k - 1), out=np.zeros(n), where=ok)
    b = np.divide(2 * t, (k - 1) * delta, out=np.zeros(n), where=ok)

    # omega_i = floor(sum_j min(k_j - 1, k_i - 1) / 2) over neighbors j
    src = u.sources()
    cap = np.minimum(k[u.indices] - 1, k[src] - 1)
    omega = np.bincount(src, weights=cap, minlength=n).astype(np.int64) // 2
    d = np.divide(t, omega, out=np.zeros(n), where=ok & (omega > 0))
    return Clustering(c, b, d, t, omega, k)


def clustering_mixing(g: Graph, variant: str = "c", clustering: Clustering | None = None) -> float:
    """Pearson correlation of a clustering variant at both ends of every link."""
    u = undirected_view(g)
    if clustering is None:
        clustering = clustering_coefficients(u)
    values = clustering.variant(variant)
    src, dst = link_pairs(u)
    return pearson(values[src], values[dst])
