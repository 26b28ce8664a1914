from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph, GraphError, undirected_view


class DegenerateTailError(ValueError):
    pass


class UndefinedMixing(ValueError):
    """Pearson correlation with a zero-variance side."""


def powerlaw_exponent(degrees, k_min: float = 10) -> float:
    """Maximum-likelihood exponent of the distribution tail ``k >= k_min``.

    gamma = 1 + n / sum(ln(k / k_min)) over the n tail values.
    """
    k = np.asarray(degrees, dtype=float)
    tail = k[k >= k_min]
    if tail.size < 2:
        raise DegenerateTailError(f"only {tail.size} values at or above k_min={k_min}")
    total = np.sum(np.log(tail / k_min))
    if total <= 0:
        raise DegenerateTailError("degenerate tail: all values equal k_min")
    return 1.0 + tail.size / total


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise UndefinedMixing("fewer than two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = np.dot(dx, dx)
    syy = np.dot(dy, dy)
    if sxx <= 0 or syy <= 0:
        raise UndefinedMixing("zero variance")
    return float(np.clip(np.dot(dx, dy) / np.sqrt(sxx * syy), -1.0, 1.0))


def _role_degree(g: Graph, role: str) -> np.ndarray:
    if role == "total":
        return g.degree(loops=False)
    if not g.directed:
        raise GraphError(f"{role}-degree needs a directed graph")
    if role == "in":
        return g.in_degree(loops=False)
    if role == "out":
        return g.out_degree(loops=False)
    raise ValueError(f"unknown degree role {role!r}")


def link_pairs(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Source/target arrays over links without self-loops; undirected links
    appear in both orientations."""
    src = g.sources()
    dst = g.indices
    keep = src != dst
    return src[keep], dst[keep]


def degree_mixing(g: Graph, alpha: str = "total", beta: str = "total") -> float:
    """Pearson correlation of the source ``alpha``-degree and target
    ``beta``-degree over links. Raises :class:`UndefinedMixing` on zero variance."""
    src, dst = link_pairs(g)
    return pearson(_role_degree(g, alpha)[src], _role_degree(g, beta)[dst])


@dataclass(frozen=True)
class Profile:
    kind: str
    k: np.ndarray
    value: np.ndarray
    count: np.ndarray

    def rows(self):
        return zip(self.k.tolist(), self.value.tolist(), self.count.tolist())


def _by_degree(kind, k, values) -> Profile:
    ks, inverse, counts = np.unique(k, return_inverse=True, return_counts=True)
    sums = np.bincount(inverse, weights=values, minlength=ks.size)
    return Profile(kind, ks, sums / counts, counts)


def degree_profiles(g: Graph, clustering=None) -> tuple[Profile, Profile, Profile]:
    """Neighbor connectivity N(k), clustering profile C(k) and degree histogram.

    Degrees are taken on the undirected view. ``clustering`` may pass
    precomputed per-node ``c`` values.
    """
    from .clustering import clustering_coefficients

    u = undirected_view(g)
    k = u.degree()
    src = u.sources()
    nbr_sum = np.bincount(src, weights=k[u.indices], minlength=u.node_count)
    mean_nbr = np.divide(nbr_sum, k, out=np.zeros(u.node_count), where=k > 0)
    if clustering is None:
        clustering = clustering_coefficients(u).c
    hist = _by_degree("degree_histogram", k, np.ones(u.node_count))
    hist = Profile(hist.kind, hist.k, hist.count / u.node_count, hist.count)
    return (_by_degree("neighbor_connectivity", k, mean_nbr),
            _by_degree("clustering_by_degree", k, clustering), hist)
