import json
from itertools import combinations

import numpy as np
import pytest

from bibconsist.graph import EmptyGraphError
from bibconsist.ingest import (
    IngestError,
    RecordSet,
    build_author_citation,
    build_coauthorship,
    build_network,
    build_paper_citation,
    make_record,
    parse_records,
    to_jsonl,
)
from bibconsist.synthetic import synthetic_records


def labeled_links(g):
    src, dst = g.links()
    return {(g.labels[a], g.labels[b]) for a, b in zip(src.tolist(), dst.tolist())}


def test_parse_jsonl():
    data = b'{"id":"a","authors":["x","y"],"refs":["b"]}\n{"id":"b","authors":["y"],"refs":[]}\n'
    rs = parse_records(data, "jsonl")
    assert len(rs.records) == 2
    assert rs.author_keys == ["x", "y"]
    assert rs.records[0].refs == ("b",)


def test_parse_edgelist():
    rs = parse_records(b"0 1\n1 2", "edgelist")
    assert len(rs.records) == 3
    assert all(r.authors == () for r in rs.records)
    refs = {r.paper_id: r.refs for r in rs.records}
    assert refs == {"0": ("1",), "1": ("2",), "2": ()}


def test_cora_pairs_are_cited_then_citing():
    rs = parse_records(b"35 1033\n35 103482\n", "cora-pairs")
    g = build_paper_citation(rs)
    assert labeled_links(g) == {("1033", "35"), ("103482", "35")}


def test_unknown_format():
    with pytest.raises(IngestError):
        parse_records(b"", "bibtex")


def test_malformed_threshold():
    good = b"".join(b'{"id":"p%d"}\n' % i for i in range(19))
    rs = parse_records(good + b"garbage\n", "jsonl")
    assert rs.malformed == 1 and len(rs.records) == 19
    with pytest.raises(IngestError):
        parse_records(good[:60] + b"x\ny\nz\n", "jsonl")


def test_non_utf8():
    with pytest.raises(IngestError):
        parse_records(b"\xff\xfe 1 2\n", "edgelist")


def test_record_dedup_and_duplicate_ids():
    rec = make_record("a", ["x", "x", "y"], ["b", "b"])
    assert rec.authors == ("x", "y") and rec.refs == ("b",)
    with pytest.raises(IngestError):
        RecordSet([make_record("a"), make_record("a")])


def test_paper_citation_examples():
    rs = RecordSet([make_record("a", refs=["b"]), make_record("b"), make_record("c")])
    g = build_paper_citation(rs)
    assert g.node_count == 2 and labeled_links(g) == {("a", "b")}

    rs = RecordSet([make_record("a", refs=["a", "b"]), make_record("b")])
    g = build_paper_citation(rs)
    assert labeled_links(g) == {("a", "b")}


def test_paper_citation_needs_links():
    with pytest.raises(EmptyGraphError):
        build_paper_citation(RecordSet([make_record("a", refs=["zzz"])]))


def test_dangling_counted():
    rs = RecordSet([make_record("a", refs=["b", "nowhere"]), make_record("b")])
    assert rs.dangling == 1
    assert build_paper_citation(rs).link_count == 1


def test_author_citation_examples():
    rs = RecordSet([make_record("p1", ["x"], ["p2"]), make_record("p2", ["y", "z"])])
    assert labeled_links(build_author_citation(rs)) == {("x", "y"), ("x", "z")}
    rs = RecordSet([make_record("p1", ["x"], ["p2"]), make_record("p2", ["x"])])
    g = build_author_citation(rs)
    assert labeled_links(g) == {("x", "x")} and g.self_loops.all()


def test_author_citation_pair_oracle():
    rs = RecordSet([
        make_record("p1", ["a", "b"], ["p2", "p3"]),
        make_record("p2", ["c"], ["p3"]),
        make_record("p3", ["b", "d"]),
    ])
    papers = {r.paper_id: r for r in rs.records}
    want = set()
    for citing in rs.records:
        for ref in citing.refs:
            for u in citing.authors:
                for v in papers[ref].authors:
                    want.add((u, v))
    assert labeled_links(build_author_citation(rs)) == want


def test_authorless_records_rejected():
    rs = parse_records(b"0 1\n", "edgelist")
    with pytest.raises(IngestError):
        build_author_citation(rs)
    with pytest.raises(IngestError):
        build_coauthorship(rs)


def test_coauthorship_examples():
    g = build_coauthorship(RecordSet([make_record("p", ["x", "y", "z"])]))
    assert g.node_count == 3 and g.link_count == 3
    g = build_coauthorship(RecordSet([make_record("p", ["x", "y"]), make_record("q", ["y", "z"])]))
    assert g.link_count == 2
    with pytest.raises(EmptyGraphError):
        build_coauthorship(RecordSet([make_record("p", ["x"]), make_record("q", ["y"])]))


def test_coauthorship_clique_oracle(rng):
    records = []
    for i in range(50):
        k = int(rng.integers(1, 6))
        authors = [f"a{j}" for j in rng.choice(30, k, replace=False)]
        records.append(make_record(f"p{i}", authors))
    g = build_coauthorship(RecordSet(records))
    want = set()
    for r in records:
        want |= {tuple(sorted(p)) for p in combinations(r.authors, 2)}
    src, dst = g.links()
    got = {tuple(sorted((g.labels[a], g.labels[b]))) for a, b in zip(src.tolist(), dst.tolist())}
    assert got == want
    assert set(g.labels) == {a for pair in want for a in pair}


@pytest.mark.parametrize("paradigm", ["pp", "aa-cite", "aa-coauth"])
def test_builder_invariants(paradigm):
    rs = synthetic_records(200, 80, seed=3)
    g = build_network(rs, paradigm)
    assert g.degree().min() >= 1
    if paradigm != "aa-cite":
        assert not g.self_loops.any()
    again = build_network(rs, paradigm)
    assert np.array_equal(g.indices, again.indices) and g.labels == again.labels


def test_author_links_backed_by_paper_links():
    rs = synthetic_records(150, 60, seed=5)
    pp = labeled_links(build_paper_citation(rs))
    by_author = {}
    for rec in rs.records:
        for a in rec.authors:
            by_author.setdefault(a, set()).add(rec.paper_id)
    for u, v in labeled_links(build_author_citation(rs)):
        assert any((p, q) in pp for p in by_author[u] for q in by_author[v])


def test_unknown_paradigm():
    with pytest.raises(IngestError):
        build_network(synthetic_records(20, 10), "pp2")


def test_jsonl_roundtrip():
    rs = synthetic_records(40, 15, seed=1)
    back = parse_records(to_jsonl(rs).encode(), "jsonl")
    assert back.records == rs.records
    for line in to_jsonl(rs).splitlines():
        assert set(json.loads(line)) <= {"id", "authors", "refs", "year"}
