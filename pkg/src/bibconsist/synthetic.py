"""Synthetic bibliographic databases for demos and pipeline tests."""
from __future__ import annotations

import numpy as np

from .ingest import Record, RecordSet, make_record


def synthetic_records(n_papers: int = 400, n_authors: int = 150, refs: float = 6.0,
                      team: float = 2.5, recency: float = 0.0, seed: int = 0) -> RecordSet:
    """Papers arrive in order and cite earlier ones with probability growing
    with their citation count (plus ``recency`` bias). Team sizes are
    1 + Poisson(team - 1); authors are drawn with preferential productivity."""
    rng = np.random.default_rng(seed)
    cited = np.ones(n_papers)
    productivity = np.ones(n_authors)
    records: list[Record] = []
    for p in range(n_papers):
        size = min(n_authors, 1 + rng.poisson(max(team - 1, 0)))
        w = productivity / productivity.sum()
        authors = rng.choice(n_authors, size=size, replace=False, p=w)
        productivity[authors] += 1
        out = []
        if p:
            k = min(p, rng.poisson(refs))
            weight = cited[:p] * np.exp(recency * (np.arange(p) - p) / max(p, 1))
            out = rng.choice(p, size=k, replace=False, p=weight / weight.sum()).tolist()
            cited[out] += 1
        records.append(make_record(f"p{p}", [f"a{a}" for a in authors],
                                   [f"p{q}" for q in out], year=p))
    return RecordSet(records)
