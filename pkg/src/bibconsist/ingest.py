"""Bibliographic records and the three network paradigms built from them.

* ``pp``: directed paper citation network (P->P)
* ``aa-cite``: directed author citation network (A<->A), self-loops kept
* ``aa-coauth``: undirected co-authorship network (A-A)
"""
from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import BinaryIO, Iterable

import numpy as np

from .graph import EmptyGraphError, Graph, build_graph

log = logging.getLogger(__name__)

FORMATS = ("jsonl", "edgelist", "cora-pairs")
PARADIGMS = ("pp", "aa-cite", "aa-coauth")
MALFORMED_LIMIT = 0.10


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    paper_id: str
    authors: tuple[str, ...] = ()
    refs: tuple[str, ...] = ()
    year: int | None = None


def _dedup(keys) -> tuple[str, ...]:
    return tuple(dict.fromkeys(str(k) for k in keys))


@dataclass
class RecordSet:
    records: list[Record]
    malformed: int = 0
    papers: dict[str, int] = field(init=False)
    authors: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.papers = {}
        self.authors = {}
        for rec in self.records:
            if rec.paper_id in self.papers:
                raise IngestError(f"duplicate paper id {rec.paper_id!r}")
            self.papers[rec.paper_id] = len(self.papers)
            for a in rec.authors:
                self.authors.setdefault(a, len(self.authors))

    @property
    def paper_keys(self) -> list[str]:
        return list(self.papers)

    @property
    def author_keys(self) -> list[str]:
        return list(self.authors)

    @property
    def dangling(self) -> int:
        """References to papers absent from the set."""
        return sum(1 for rec in self.records for r in rec.refs if r not in self.papers)

    def citations(self) -> Iterable[tuple[Record, Record]]:
        """Resolvable (citing, cited) record pairs, paper self-citations excluded."""
        index = {rec.paper_id: rec for rec in self.records}
        for rec in self.records:
            for ref in rec.refs:
                cited = index.get(ref)
                if cited is not None and cited is not rec:
                    yield rec, cited


def make_record(paper_id, authors=(), refs=(), year=None) -> Record:
    paper_id = str(paper_id)
    if not paper_id:
        raise IngestError("empty paper id")
    return Record(paper_id, _dedup(authors), _dedup(refs),
                  None if year is None else int(year))


def _check_malformed(bad: int, total: int) -> None:
    if total and bad / total > MALFORMED_LIMIT:
        raise IngestError(f"{bad} of {total} lines malformed; wrong format?")
    if bad:
        log.warning("skipped %d malformed lines of %d", bad, total)


def _parse_jsonl(lines) -> RecordSet:
    records, seen, bad, total = [], set(), 0, 0
    for line in lines:
        if not line.strip():
            continue
        total += 1
        try:
            obj = json.loads(line)
            rec = make_record(obj["id"], obj.get("authors") or (), obj.get("refs") or (),
                              obj.get("year"))
        except (ValueError, KeyError, TypeError):
            bad += 1
            continue
        if rec.paper_id in seen:
            bad += 1
            continue
        seen.add(rec.paper_id)
        records.append(rec)
    _check_malformed(bad, total)
    return RecordSet(records, bad)


def _parse_pairs(lines, reverse: bool) -> RecordSet:
    refs: dict[str, list[str]] = {}
    bad = total = 0
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        total += 1
        parts = line.split()
        if len(parts) != 2:
            bad += 1
            continue
        citing, cited = (parts[1], parts[0]) if reverse else (parts[0], parts[1])
        refs.setdefault(citing, []).append(cited)
        refs.setdefault(cited, [])
    _check_malformed(bad, total)
    return RecordSet([make_record(p, (), r) for p, r in refs.items()], bad)


def parse_records(stream: BinaryIO | bytes, format: str) -> RecordSet:
    """Parse a UTF-8 byte stream into records.

    ``edgelist`` lines read ``citing cited``; ``cora-pairs`` lines read
    ``cited citing`` as in the distributed Cora ``.cites`` files. Both give
    authorless records.
    """
    if format not in FORMATS:
        raise IngestError(f"unknown format {format!r}; expected one of {FORMATS}")
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    text = io.TextIOWrapper(stream, encoding="utf-8")
    try:
        if format == "jsonl":
            return _parse_jsonl(text)
        return _parse_pairs(text, reverse=format == "cora-pairs")
    except UnicodeDecodeError as exc:
        raise IngestError(f"input is not UTF-8: {exc}") from exc
    finally:
        text.detach()


def _prune(links: np.ndarray, keys: list[str], directed: bool, allow_self_loops: bool) -> Graph:
    # zero-degree nodes go, survivors keep their relative order
    used = np.unique(links)
    remap = np.full(len(keys), -1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    return build_graph(remap[links], directed=directed, allow_self_loops=allow_self_loops,
                       node_count=used.size, labels=[keys[i] for i in used])


def build_paper_citation(rs: RecordSet) -> Graph:
    links = [(rs.papers[a.paper_id], rs.papers[b.paper_id]) for a, b in rs.citations()]
    if not links:
        raise EmptyGraphError("no resolvable citations between papers")
    return _prune(np.array(links, dtype=np.int64), rs.paper_keys, True, False)


def build_author_citation(rs: RecordSet) -> Graph:
    if not rs.authors:
        raise IngestError("records carry no authors")
    ids = rs.authors
    links = set()
    for citing, cited in rs.citations():
        for u in citing.authors:
            for v in cited.authors:
                links.add((ids[u], ids[v]))
    if not links:
        raise EmptyGraphError("no citations between authored papers")
    return _prune(np.array(sorted(links), dtype=np.int64), rs.author_keys, True, True)


def build_coauthorship(rs: RecordSet) -> Graph:
    if not rs.authors:
        raise IngestError("records carry no authors")
    ids = rs.authors
    links = set()
    for rec in rs.records:
        for u, v in combinations(sorted(ids[a] for a in rec.authors), 2):
            links.add((u, v))
    if not links:
        raise EmptyGraphError("no co-authored papers")
    return _prune(np.array(sorted(links), dtype=np.int64), rs.author_keys, False, False)


BUILDERS = {
    "pp": build_paper_citation,
    "aa-cite": build_author_citation,
    "aa-coauth": build_coauthorship,
}


def build_network(rs: RecordSet, paradigm: str) -> Graph:
    try:
        builder = BUILDERS[paradigm]
    except KeyError:
        raise IngestError(f"unknown paradigm {paradigm!r}") from None
    return builder(rs)


def to_jsonl(rs: RecordSet) -> str:
    out = []
    for rec in rs.records:
        obj = {"id": rec.paper_id, "authors": list(rec.authors), "refs": list(rec.refs)}
        if rec.year is not None:
            obj["year"] = rec.year
        out.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(out) + "\n"
