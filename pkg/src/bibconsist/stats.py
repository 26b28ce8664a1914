"""Residual-based consistency statistics across databases.

Rows of a :class:`MeasureMatrix` are databases, columns network measures.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import stats as sps

log = logging.getLogger(__name__)

ALPHA = 0.1
NEMENYI_Q = 2.59


class StatsError(ValueError):
    pass


class DegenerateColumnError(StatsError):
    pass


@dataclass
class MeasureMatrix:
    databases: list[str]
    measures: list[str]
    values: np.ndarray  # NaN marks a missing cell
    dropped: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n, m = self.values.shape
        if n != len(self.databases) or m != len(self.measures):
            raise StatsError("matrix shape does not match labels")
        if n < 4:
            raise StatsError(f"need at least 4 databases, got {n}")
        keep = []
        for j, name in enumerate(self.measures):
            absent = int(np.isnan(self.values[:, j]).sum())
            if absent > 1:
                self.dropped[name] = f"{absent} missing cells"
                log.warning("dropping measure %s: %d missing cells", name, absent)
            else:
                keep.append(j)
        self.measures = [self.measures[j] for j in keep]
        self.values = self.values[:, keep]


@dataclass
class ResidualMatrix:
    databases: list[str]
    measures: list[str]
    residuals: np.ndarray
    ranks: np.ndarray
    flags: np.ndarray
    critical: np.ndarray
    rejected: dict[str, str] = field(default_factory=dict)


def studentized_column(x) -> np.ndarray:
    """Externally studentized residuals of one column.

    Each value is compared with the mean and corrected standard deviation of
    the other values: ``(x_i - mu_i) / (sigma_i * sqrt(1 - 1/N))``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 3:
        raise StatsError("need at least three values")
    total = x.sum()
    out = np.empty(n)
    for i in range(n):
        rest = np.delete(x, i)
        mu = (total - x[i]) / (n - 1)
        sigma = math.sqrt(np.sum((rest - mu) ** 2) / (n - 2))
        if sigma == 0:
            raise DegenerateColumnError(f"row {i}: other values are constant")
        out[i] = (x[i] - mu) / (sigma * math.sqrt(1 - 1 / n))
    return out


def t_critical(df: int, alpha: float = ALPHA) -> float:
    """Two-tailed Student t critical value."""
    return float(sps.t.ppf(1 - alpha / 2, df))


def residual_ranks(residuals: np.ndarray) -> np.ndarray:
    """Rank 1 for the smallest ``|x|``; missing cells rank last, ties by row order."""
    key = np.where(np.isnan(residuals), np.inf, np.abs(residuals))
    ranks = np.empty(residuals.shape, dtype=np.int64)
    for j in range(residuals.shape[1]):
        order = np.argsort(key[:, j], kind="stable")
        ranks[order, j] = np.arange(1, residuals.shape[0] + 1)
    return ranks


def studentized_residuals(m: MeasureMatrix, alpha: float = ALPHA) -> ResidualMatrix:
    """Residuals, ranks and inconsistency flags; constant columns are rejected."""
    n = len(m.databases)
    cols, names, crit, rejected = [], [], [], {}
    for j, name in enumerate(m.measures):
        x = m.values[:, j]
        present = ~np.isnan(x)
        col = np.full(n, np.nan)
        try:
            col[present] = studentized_column(x[present])
        except DegenerateColumnError as exc:
            rejected[name] = str(exc)
            log.warning("measure %s rejected: %s", name, exc)
            continue
        cols.append(col)
        names.append(name)
        crit.append(t_critical(int(present.sum()) - 2, alpha))
    residuals = np.column_stack(cols) if cols else np.empty((n, 0))
    crit = np.array(crit)
    with np.errstate(invalid="ignore"):
        flags = np.abs(residuals) > crit
    return ResidualMatrix(list(m.databases), names, residuals, residual_ranks(residuals),
                          flags, crit, rejected)


def fisher_z(r: float, n: int) -> float:
    """Adjusted Fisher transformation ``sqrt(n - 3) / 2 * ln((1 + r) / (1 - r))``."""
    if n < 4:
        raise StatsError("Fisher transformation needs n >= 4")
    if abs(r) >= 1:
        return math.copysign(math.inf, r)
    return math.sqrt(n - 3) / 2 * math.log((1 + r) / (1 - r))


def z_critical(alpha: float = ALPHA) -> float:
    return float(sps.norm.ppf(1 - alpha / 2))


def _corr(x, y) -> float:
    dx, dy = x - x.mean(), y - y.mean()
    den = math.sqrt(np.dot(dx, dx) * np.dot(dy, dy))
    if den == 0:
        return 0.0
    return float(np.clip(np.dot(dx, dy) / den, -1, 1))


@dataclass(frozen=True)
class PairTest:
    a: str
    b: str
    pearson: float
    spearman: float
    z_pearson: float
    z_spearman: float
    dependent: bool


def pair_tests(rm: ResidualMatrix, alpha: float = ALPHA) -> list[PairTest]:
    """Pearson of residual columns and Spearman of |residual| columns, per measure pair."""
    zc = z_critical(alpha)
    out = []
    for i, j in combinations(range(len(rm.measures)), 2):
        x, y = rm.residuals[:, i], rm.residuals[:, j]
        ok = ~(np.isnan(x) | np.isnan(y))
        n = int(ok.sum())
        rp = _corr(x[ok], y[ok])
        rs = _corr(sps.rankdata(np.abs(x[ok])), sps.rankdata(np.abs(y[ok])))
        zp, zs = fisher_z(rp, n), fisher_z(rs, n)
        out.append(PairTest(rm.measures[i], rm.measures[j], rp, rs, zp, zs,
                            abs(zp) >= zc or abs(zs) >= zc))
    return out


def select_independent_measures(rm: ResidualMatrix, alpha: float = ALPHA) -> list[str]:
    """Greedily drop measures until no pair is dependent at level ``alpha``.

    The measure in most dependent pairs goes first; ties go to the larger
    summed |z|, then to the later measure.
    """
    if len(rm.measures) < 2:
        raise StatsError("need at least two measures")
    alive = list(rm.measures)
    tests = [t for t in pair_tests(rm, alpha) if t.dependent]
    while tests:
        count = {name: 0 for name in alive}
        weight = {name: 0.0 for name in alive}
        for t in tests:
            z = max(abs(t.z_pearson), abs(t.z_spearman))
            for name in (t.a, t.b):
                count[name] += 1
                weight[name] += z
        pos = {name: k for k, name in enumerate(rm.measures)}
        victim = max(alive, key=lambda s: (count[s], weight[s], pos[s]))
        alive.remove(victim)
        tests = [t for t in tests if victim not in (t.a, t.b)]
    if len(alive) < 2:
        raise StatsError("measures mutually redundant")
    return alive


def friedman_test(ranks, alpha: float = ALPHA) -> tuple[float, bool]:
    """Friedman statistic from an N x K rank matrix (databases x measures)."""
    ranks = np.asarray(ranks, dtype=float)
    n, k = ranks.shape
    mean = ranks.mean(axis=1)
    stat = 12 * k / (n * (n + 1)) * (np.sum(mean ** 2) - n * (n + 1) ** 2 / 4)
    return float(stat), bool(stat > sps.chi2.ppf(1 - alpha, n - 1))


def critical_difference(n: int, k: int, q: float = NEMENYI_Q) -> float:
    return q * math.sqrt(n * (n + 1) / (6 * k))


@dataclass
class RankingResult:
    databases: list[str]
    mean_ranks: np.ndarray
    friedman_statistic: float
    friedman_significant: bool
    critical_difference: float
    groups: list[list[str]]
    measures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        order = np.argsort(self.mean_ranks, kind="stable")
        return {
            "measures": list(self.measures),
            "ranking": [{"database": self.databases[i], "mean_rank": float(self.mean_ranks[i])}
                        for i in order],
            "friedman_statistic": self.friedman_statistic,
            "friedman_significant": self.friedman_significant,
            "critical_difference": self.critical_difference,
            "groups": self.groups,
        }


def nemenyi_groups(mean_ranks, n: int, k: int, q: float = NEMENYI_Q,
                   databases=None, significant: bool = True) -> RankingResult:
    """Maximal runs of rank-sorted databases spanning less than the critical difference."""
    mean_ranks = np.asarray(mean_ranks, dtype=float)
    if databases is None:
        databases = [str(i) for i in range(mean_ranks.size)]
    cd = critical_difference(n, k, q)
    order = np.argsort(mean_ranks, kind="stable")
    if not significant:
        groups = [[databases[i] for i in order]]
    else:
        spans = []
        for a in range(order.size):
            b = a
            while b + 1 < order.size and mean_ranks[order[b + 1]] - mean_ranks[order[a]] < cd:
                b += 1
            if not spans or b > spans[-1][1]:
                spans.append((a, b))
        groups = [[databases[i] for i in order[a:b + 1]] for a, b in spans]
    return RankingResult(list(databases), mean_ranks, math.nan, significant, cd, groups)


def rank_databases(rm: ResidualMatrix, measures: list[str], alpha: float = ALPHA,
                   q: float = NEMENYI_Q) -> RankingResult:
    """Friedman test then Nemenyi grouping over the selected measures."""
    cols = [rm.measures.index(name) for name in measures]
    ranks = rm.ranks[:, cols]
    n, k = ranks.shape
    stat, significant = friedman_test(ranks, alpha)
    result = nemenyi_groups(ranks.mean(axis=1), n, k, q, rm.databases, significant)
    result.friedman_statistic = stat
    result.measures = list(measures)
    return result
