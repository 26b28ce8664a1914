"""On-disk formats: binary graphs, CSV tables, sample exports.

Binary graph layout::

    b"BCGRAPH1"  | uint32 header length | UTF-8 JSON header
    int32[link_count] sources | int32[link_count] targets | labels as a JSON array
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import struct
from pathlib import Path

import numpy as np

from .graph import Graph, _from_unique

MAGIC = b"BCGRAPH1"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _labels_blob(g: Graph) -> bytes:
    labels = g.labels if g.labels is not None else [str(i) for i in range(g.node_count)]
    return json.dumps(list(labels), ensure_ascii=False).encode("utf-8")


def graph_header(g: Graph, **meta) -> dict:
    blob = _labels_blob(g)
    header = {
        "nodes": g.node_count,
        "links": g.link_count,
        "directed": g.directed,
        "self_loops": int(g.self_loops.sum()),
        "id_table_sha256": sha256_bytes(blob),
        "labels_bytes": len(blob),
    }
    header.update(meta)
    return header


def write_graph(path, g: Graph, **meta) -> dict:
    if g.node_count >= 2**31:
        raise ValueError("graph too large for int32 ids")
    header = graph_header(g, **meta)
    raw = json.dumps(header, sort_keys=True).encode("utf-8")
    src, dst = g.links()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)
        fh.write(src.astype("<i4").tobytes())
        fh.write(dst.astype("<i4").tobytes())
        fh.write(_labels_blob(g))
    return header


def read_graph(path) -> tuple[Graph, dict]:
    data = Path(path).read_bytes()
    if data[:len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a graph file")
    pos = len(MAGIC)
    (size,) = struct.unpack_from("<I", data, pos)
    pos += 4
    header = json.loads(data[pos:pos + size])
    pos += size
    m = header["links"]
    src = np.frombuffer(data, dtype="<i4", count=m, offset=pos).astype(np.int64)
    dst = np.frombuffer(data, dtype="<i4", count=m, offset=pos + 4 * m).astype(np.int64)
    blob = data[pos + 8 * m:]
    if sha256_bytes(blob) != header["id_table_sha256"]:
        raise ValueError(f"{path}: id table digest mismatch")
    labels = tuple(json.loads(blob.decode("utf-8")))
    g = _from_unique(src, dst, header["nodes"], header["directed"], labels)
    return g, header


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_profile(path, profile) -> None:
    write_csv(path, ["k", "value", "count"], profile.rows())


def write_hop_plot(path, hop_plot) -> None:
    write_csv(path, ["delta", "value", "count"],
              ((d, h, hop_plot.realizations) for d, h in hop_plot.rows()))


def write_sample(stem, sample, g: Graph, **meta) -> None:
    """Edge list, DOT file and metadata JSON for one sample."""
    stem = str(stem)
    label = (lambda i: g.labels[i]) if g.labels is not None else str
    lines = [f"{label(u)} {label(v)}\n" for u, v in sample.induced_links]
    Path(stem + ".edges").write_text("".join(lines), encoding="utf-8")
    kind, arrow = ("digraph", "->") if g.directed else ("graph", "--")
    dot = [f"{kind} sample {{"]
    quote = lambda i: json.dumps(label(i), ensure_ascii=False)  # noqa: E731
    dot += [f"  {quote(u)};" for u in sample.node_ids]
    dot += [f"  {quote(u)} {arrow} {quote(v)};" for u, v in sample.induced_links]
    dot.append("}")
    Path(stem + ".dot").write_text("\n".join(dot) + "\n", encoding="utf-8")
    obj = {
        "ks": sample.ks,
        "seed": sample.seed,
        "index": sample.index,
        "size": sample.size,
        "links": len(sample.induced_links),
        "truncated": sample.truncated,
        "nodes": [label(u) for u in sample.node_ids],
    }
    obj.update(meta)
    write_json(Path(stem + ".json"), obj)
