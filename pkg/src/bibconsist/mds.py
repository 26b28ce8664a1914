"""Non-metric multidimensional scaling (Kruskal stress-1, SMACOF updates)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np


STRESS_FLOOR = 1e-12


class MDSError(ValueError):
    pass


@dataclass
class Embedding:
    coordinates: np.ndarray
    stress: float
    iterations: int
    seed: int
    restart: int = 0
    history: list[float] = field(default_factory=list)
    runs: list[list[float]] = field(default_factory=list)  # stress history of every restart


def dissimilarity_matrix(values, normalization: str = "zscore") -> np.ndarray:
    """Euclidean distances between rows; NaN cells are skipped pairwise and the
    partial distance rescaled by ``sqrt(M / M_present)``."""
    x = np.asarray(values, dtype=float)
    if normalization == "zscore":
        mu = np.nanmean(x, axis=0)
        sd = np.nanstd(x, axis=0)
        if np.any(~(sd > 0)):
            raise MDSError("zero-variance column cannot be standardized")
        x = (x - mu) / sd
    elif normalization != "none":
        raise ValueError(f"unknown normalization {normalization!r}")
    n, m = x.shape
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            diff = x[i] - x[j]
            ok = ~np.isnan(diff)
            if not ok.any():
                raise MDSError(f"rows {i} and {j} share no measured column")
            D[i, j] = D[j, i] = np.sqrt(np.sum(diff[ok] ** 2) * m / ok.sum())
    return D


@numba.njit(cache=True)
def _pava(y):
    n = y.size
    vals = np.empty(n)
    wts = np.empty(n)
    sizes = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        vals[k] = y[i]
        wts[k] = 1.0
        sizes[k] = 1
        k += 1
        while k > 1 and vals[k - 2] > vals[k - 1]:
            w = wts[k - 2] + wts[k - 1]
            vals[k - 2] = (wts[k - 2] * vals[k - 2] + wts[k - 1] * vals[k - 1]) / w
            wts[k - 2] = w
            sizes[k - 2] += sizes[k - 1]
            k -= 1
    out = np.empty(n)
    pos = 0
    for b in range(k):
        for _ in range(sizes[b]):
            out[pos] = vals[b]
            pos += 1
    return out


def pava(y) -> np.ndarray:
    """Least-squares non-decreasing fit (pool adjacent violators)."""
    return _pava(np.ascontiguousarray(y, dtype=float))


@numba.njit(cache=True)
def _disparities(base, block, dist):
    # primary tie handling: within a block of equal dissimilarities,
    # order by current distance (stable insertion sort)
    order = base.copy()
    for i in range(1, order.size):
        j = i
        while j > block[i] and dist[order[j - 1]] > dist[order[j]]:
            order[j - 1], order[j] = order[j], order[j - 1]
            j -= 1
    fit = np.empty(order.size)
    f = _pava(dist[order])
    for i in range(order.size):
        fit[order[i]] = f[i]
    return fit


def _tie_blocks(dissim):
    base = np.argsort(dissim, kind="stable")
    s = dissim[base]
    start = np.zeros(s.size, dtype=np.int64)
    for i in range(1, s.size):
        start[i] = start[i - 1] if s[i] == s[i - 1] else i
    return base, start


@numba.njit(cache=True)
def _upper_dist(X, iu0, iu1):
    out = np.empty(iu0.size)
    for k in range(iu0.size):
        acc = 0.0
        for c in range(X.shape[1]):
            d = X[iu0[k], c] - X[iu1[k], c]
            acc += d * d
        out[k] = np.sqrt(acc)
    return out


@numba.njit(cache=True)
def _stress(fit, dist):
    num = 0.0
    den = 0.0
    for k in range(dist.size):
        num += (fit[k] - dist[k]) ** 2
        den += dist[k] ** 2
    if den == 0:
        return 0.0
    return np.sqrt(num / den)


def stress1(dissim_upper, dist_upper, fit=None) -> float:
    """Kruskal stress-1 of embedded distances against monotone disparities."""
    dissim_upper = np.asarray(dissim_upper, dtype=float)
    dist_upper = np.ascontiguousarray(dist_upper, dtype=float)
    if fit is None:
        fit = _disparities(*_tie_blocks(dissim_upper), dist_upper)
    return float(_stress(np.asarray(fit, dtype=float), dist_upper))


def classical_scaling(D, p):
    n = D.shape[0]
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D ** 2) @ J
    w, v = np.linalg.eigh(B)
    top = np.argsort(w)[::-1][:p]
    return v[:, top] * np.sqrt(np.maximum(w[top], 0))


@numba.njit(cache=True)
def _smacof_loop(base, block, iu0, iu1, X, max_iter, tol, floor):
    n, p = X.shape
    m = iu0.size
    dist = _upper_dist(X, iu0, iu1)
    fit = _disparities(base, block, dist)
    history = [_stress(fit, dist)]
    target_norm = np.sqrt(m)
    ratio = np.zeros((n, n))
    for _ in range(max_iter):
        if history[-1] <= floor:
            break
        fit = fit * (target_norm / np.sqrt(np.sum(fit * fit)))
        # optimal rescaling first keeps stress-1 non-increasing
        X = X * (np.sum(fit * dist) / np.sum(dist * dist))
        dist = _upper_dist(X, iu0, iu1)
        ratio[:, :] = 0.0
        for k in range(m):
            if dist[k] > 0:
                r = fit[k] / dist[k]
                ratio[iu0[k], iu1[k]] = r
                ratio[iu1[k], iu0[k]] = r
        Xn = np.zeros((n, p))
        for i in range(n):
            for j in range(n):
                if i != j:
                    for c in range(p):
                        Xn[i, c] += ratio[i, j] * (X[i, c] - X[j, c])
        X = Xn / n
        dist = _upper_dist(X, iu0, iu1)
        fit = _disparities(base, block, dist)
        history.append(_stress(fit, dist))
        if history[-2] - history[-1] < tol * history[-2]:
            break
    return X, history


def _smacof(D, X, max_iter, tol):
    n = D.shape[0]
    iu0, iu1 = np.triu_indices(n, 1)
    X = np.ascontiguousarray(X - X.mean(axis=0), dtype=float)
    if not np.any(_upper_dist(X, iu0, iu1) > 0):
        raise MDSError("degenerate start configuration")
    base, block = _tie_blocks(D[iu0, iu1])
    X, history = _smacof_loop(base, block, iu0, iu1, X, max_iter, tol, STRESS_FLOOR)
    return X - X.mean(axis=0), list(history)


def nmds_embed(D, p: int = 2, restarts: int = 20, seed: int = 42,
               max_iter: int = 500, tol: float = 1e-6) -> Embedding:
    """Best of ``restarts`` runs; run 0 starts from classical scaling, the rest
    from Gaussian noise. Ties in final stress go to the earlier run."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise MDSError("dissimilarities must be a square matrix")
    if not np.allclose(D, D.T, rtol=0, atol=1e-12 * max(1.0, np.abs(D).max())):
        raise MDSError("dissimilarity matrix is not symmetric")
    if np.any(np.diag(D) != 0) or np.any(D < 0):
        raise MDSError("dissimilarities must be non-negative with zero diagonal")
    n = D.shape[0]
    if n <= 2:
        X = np.zeros((n, p))
        if n == 2:
            X[0, 0], X[1, 0] = -D[0, 1] / 2, D[0, 1] / 2
        return Embedding(X, 0.0, 0, seed, 0, [0.0], [[0.0]])
    best = None
    runs = []
    for r in range(restarts):
        if r == 0:
            X0 = classical_scaling(D, p)
            if np.ptp(X0) == 0:
                X0 = np.random.default_rng([seed, r]).standard_normal((n, p))
        else:
            X0 = np.random.default_rng([seed, r]).standard_normal((n, p))
        X, history = _smacof(D, X0, max_iter, tol)
        runs.append(history)
        if best is None or history[-1] < best.stress:
            best = Embedding(X, history[-1], len(history) - 1, seed, r, history)
    best.runs = runs
    return best
