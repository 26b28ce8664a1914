"""The ingest -> measure -> sample -> compare pipeline over an output directory."""
from __future__ import annotations

import gzip
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import RunConfig
from .graph import GraphError
from .ingest import IngestError, build_network, parse_records
from .io import (
    read_graph,
    sha256_file,
    write_csv,
    write_graph,
    write_hop_plot,
    write_json,
    write_profile,
    write_sample,
)
from .mds import MDSError, dissimilarity_matrix, nmds_embed
from .measures import MeasureVector, degree_profiles, measure_names, measure_vector
from .report import cd_diagram_svg
from .sampling import best_sample
from .stats import (
    MeasureMatrix,
    StatsError,
    pair_tests,
    rank_databases,
    select_independent_measures,
    studentized_residuals,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_STATS = 0, 1, 2


@dataclass
class Outcome:
    """Per-command status; ``code`` follows the CLI exit codes."""
    code: int = EXIT_OK
    errors: list[str] = field(default_factory=list)

    def fail(self, code: int, message: str):
        log.error(message)
        self.errors.append(message)
        self.code = max(self.code, code)


def _stem(dataset: str, paradigm: str) -> str:
    return f"{dataset}__{paradigm}"


def _dirs(cfg: RunConfig) -> dict[str, Path]:
    out = cfg.out_dir
    dirs = {name: out / name for name in ("graphs", "measures", "samples", "compare")}
    for d in dirs.values():
        d.mkdir(parents=True, exist_ok=True)
    return dirs


def cmd_ingest(cfg: RunConfig, paradigms=None) -> Outcome:
    """Build and persist the requested networks; writes ``manifest.json``."""
    dirs = _dirs(cfg)
    outcome = Outcome()
    entries, inputs = [], {}
    for d in cfg.datasets:
        wanted = [p for p in d.paradigms if paradigms is None or p in paradigms]
        if not wanted:
            continue
        path = cfg.resolve(d.path)
        try:
            inputs[d.name] = sha256_file(path)
            opener = gzip.open if path.suffix == ".gz" else open
            with opener(path, "rb") as fh:
                records = parse_records(fh, d.format)
        except (OSError, IngestError) as exc:
            outcome.fail(EXIT_INPUT, f"{d.name}: {exc}")
            entries += [{"dataset": d.name, "paradigm": p, "status": "error", "reason": str(exc)}
                        for p in wanted]
            continue
        for p in wanted:
            entry = {"dataset": d.name, "paradigm": p}
            try:
                g = build_network(records, p)
            except (GraphError, IngestError) as exc:
                log.warning("%s/%s: %s", d.name, p, exc)
                entry.update(status="error", reason=str(exc))
            else:
                name = _stem(d.name, p) + ".bcg"
                header = write_graph(dirs["graphs"] / name, g, dataset=d.name, paradigm=p,
                                     input_sha256=inputs[d.name],
                                     dangling_refs=records.dangling,
                                     malformed_lines=records.malformed)
                entry.update(status="ok", file=f"graphs/{name}", header=header)
            entries.append(entry)
    write_json(cfg.out_dir / "manifest.json", {"graphs": entries, "inputs": inputs})
    return outcome


def _manifest(cfg: RunConfig) -> dict:
    path = cfg.out_dir / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"{path} missing; run ingest first")
    return json.loads(path.read_text(encoding="utf-8"))


def _ok_graphs(cfg: RunConfig, paradigms=None):
    for entry in _manifest(cfg)["graphs"]:
        if entry["status"] == "ok" and (paradigms is None or entry["paradigm"] in paradigms):
            yield entry


def cmd_measure(cfg: RunConfig, paradigms=None) -> Outcome:
    """Measure vectors, profiles and hop plots per graph, plus per-paradigm tables."""
    dirs = _dirs(cfg)
    outcome = Outcome()
    summary = []
    for entry in _ok_graphs(cfg, paradigms):
        stem = _stem(entry["dataset"], entry["paradigm"])
        g, _ = read_graph(cfg.out_dir / entry["file"])
        try:
            mv, det = measure_vector(g, cfg.k_min, cfg.anf_realizations, cfg.anf_trials,
                                     cfg.seed, cfg.alt_k_min, details=True)
        except (GraphError, ValueError) as exc:
            log.warning("%s: %s", stem, exc)
            summary.append({"dataset": entry["dataset"], "paradigm": entry["paradigm"],
                            "status": "error", "reason": str(exc)})
            continue
        write_json(dirs["measures"] / f"{stem}.json", mv.to_json())
        for profile in degree_profiles(g, det.clustering.c):
            write_profile(dirs["measures"] / f"{stem}.{profile.kind}.csv", profile)
        write_hop_plot(dirs["measures"] / f"{stem}.hop_plot.csv", det.hop_plot)
        summary.append({"dataset": entry["dataset"], "paradigm": entry["paradigm"],
                        "status": "ok", "file": f"measures/{stem}.json",
                        "missing": mv.missing})
    for p in cfg.paradigms():
        if paradigms is not None and p not in paradigms:
            continue
        vectors = _vectors(cfg, p)
        if not vectors:
            continue
        write_csv(dirs["measures"] / f"table1_{p}.csv",
                  ["database", "nodes", "links", "wcc", "in", "core", "out"],
                  ([name, mv.nodes, mv.links] + [mv.values.get(k) for k in ("wcc", "in", "core", "out")]
                   for name, mv in vectors.items()))
        names = measure_names(next(iter(vectors.values())).directed)
        write_csv(dirs["measures"] / f"measures_{p}.csv", ["database", *names],
                  ([name, *[mv.values[k] for k in names]] for name, mv in vectors.items()))
    write_json(dirs["measures"] / "summary.json", summary)
    return outcome


def _vectors(cfg: RunConfig, paradigm: str) -> dict[str, MeasureVector]:
    out = {}
    for d in cfg.datasets:
        path = cfg.out_dir / "measures" / f"{_stem(d.name, paradigm)}.json"
        if paradigm in d.paradigms and path.exists():
            out[d.name] = MeasureVector.from_json(json.loads(path.read_text(encoding="utf-8")))
    return out


def cmd_sample(cfg: RunConfig, paradigms=None) -> Outcome:
    dirs = _dirs(cfg)
    outcome = Outcome()
    for entry in _ok_graphs(cfg, paradigms):
        stem = _stem(entry["dataset"], entry["paradigm"])
        g, _ = read_graph(cfg.out_dir / entry["file"])
        try:
            s = best_sample(g, cfg.n_samples, cfg.sample_size, cfg.seed)
        except (GraphError, RuntimeError) as exc:
            outcome.fail(EXIT_INPUT, f"{stem}: sampling failed: {exc}")
            continue
        write_sample(dirs["samples"] / stem, s, g, dataset=entry["dataset"],
                     paradigm=entry["paradigm"], n_samples=cfg.n_samples)
    return outcome


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def compare_paradigm(cfg: RunConfig, paradigm: str, out: Path) -> dict:
    """Residuals, independence screening, ranking and MDS for one paradigm."""
    vectors = _vectors(cfg, paradigm)
    databases = list(vectors)
    if not databases:
        raise StatsError("no measured networks")
    names = list(measure_names(vectors[databases[0]].directed))
    values = np.array([vectors[d].as_array() for d in databases])
    matrix = MeasureMatrix(databases, names, values)
    out.mkdir(parents=True, exist_ok=True)

    rm = studentized_residuals(matrix, cfg.alpha)
    write_csv(out / "residuals.csv", ["database", *rm.measures],
              ([d, *rm.residuals[i]] for i, d in enumerate(databases)))
    write_csv(out / "ranks.csv", ["database", *rm.measures],
              ([d, *rm.ranks[i].tolist()] for i, d in enumerate(databases)))
    write_csv(out / "flags.csv", ["database", *rm.measures],
              ([d, *[int(f) for f in rm.flags[i]]] for i, d in enumerate(databases)))
    tests = pair_tests(rm, cfg.alpha)
    write_csv(out / "pair_tests.csv",
              ["a", "b", "pearson", "spearman", "z_pearson", "z_spearman", "dependent"],
              ([t.a, t.b, t.pearson, t.spearman, t.z_pearson, t.z_spearman, int(t.dependent)]
               for t in tests))

    selected = select_independent_measures(rm, cfg.alpha)
    ranking = rank_databases(rm, selected, cfg.alpha, cfg.nemenyi_q)
    rj = ranking.to_json()
    write_json(out / "cd_groups.json", rj)
    write_csv(out / "ranking.csv", ["database", "mean_rank"],
              ([r["database"], r["mean_rank"]] for r in rj["ranking"]))
    (out / "cd_diagram.svg").write_text(cd_diagram_svg(ranking, paradigm), encoding="utf-8")

    result = {
        "status": "ok",
        "databases": databases,
        "dropped_measures": matrix.dropped,
        "rejected_measures": rm.rejected,
        "inconsistent": {d: [m for j, m in enumerate(rm.measures) if rm.flags[i, j]]
                         for i, d in enumerate(databases)},
        "selected_measures": selected,
        "ranking": rj,
    }
    if not ranking.friedman_significant:
        result["banner"] = "no significant inconsistencies"

    # constant measures cannot be standardized and add nothing to distances
    varying = np.nanstd(matrix.values, axis=0) > 0
    mds = {"constant_measures": [m for m, v in zip(matrix.measures, varying) if not v]}
    try:
        D = dissimilarity_matrix(matrix.values[:, varying], cfg.normalization)
    except MDSError as exc:
        mds["error"] = str(exc)
    else:
        write_csv(out / "dissimilarity.csv", ["database", *databases],
                  ([d, *D[i]] for i, d in enumerate(databases)))
        for p in cfg.mds_dims:
            emb = nmds_embed(D, p, cfg.mds_restarts, cfg.seed)
            axes = ["x", "y", "z"][:p]
            path = out / f"mds_{p}d.csv"
            write_csv(path, ["database", *axes],
                      ([d, *emb.coordinates[i]] for i, d in enumerate(databases)))
            text = path.read_text(encoding="utf-8")
            path.write_text(f"# stress={emb.stress!r}\n" + text, encoding="utf-8")
            mds[f"{p}d"] = {"stress": emb.stress, "iterations": emb.iterations,
                            "restart": emb.restart, "file": f"compare/{paradigm}/mds_{p}d.csv"}
    result["mds"] = mds
    return result


def cmd_compare(cfg: RunConfig, paradigms=None) -> Outcome:
    """Writes ``report.json`` with every requested paradigm as a result or a reason."""
    dirs = _dirs(cfg)
    outcome = Outcome()
    results = {}
    for p in cfg.paradigms():
        if paradigms is not None and p not in paradigms:
            continue
        try:
            results[p] = compare_paradigm(cfg, p, dirs["compare"] / p)
        except (StatsError, MDSError) as exc:
            outcome.fail(EXIT_STATS, f"{p}: {exc}")
            results[p] = {"status": "error", "reason": str(exc)}
    manifest = _manifest(cfg)
    report = {
        "provenance": {
            "package": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "seed": cfg.seed,
            "config": cfg.to_json(),
            "inputs": manifest.get("inputs", {}),
        },
        "networks": manifest["graphs"],
        "paradigms": results,
    }
    write_json(cfg.out_dir / "report.json", _clean(report))
    return outcome


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return _finite(obj)
    return obj


def cmd_all(cfg: RunConfig, paradigms=None) -> Outcome:
    total = Outcome()
    for step in (cmd_ingest, cmd_measure, cmd_sample, cmd_compare):
        res = step(cfg, paradigms)
        total.errors += res.errors
        total.code = max(total.code, res.code)
    return total
