from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph, bow_tie, largest_wcc, undirected_view
from .anf import HopPlot, effective_diameter, hop_plot_anf
from .clustering import Clustering, clustering_coefficients, clustering_mixing
from .degree import DegenerateTailError, UndefinedMixing, degree_mixing, powerlaw_exponent

DIRECTED_MEASURES = (
    "wcc", "in", "core", "out", "mean_degree", "gamma", "gamma_in", "gamma_out",
    "r", "r_in_in", "r_in_out", "r_out_in", "r_out_out",
    "mean_c", "mean_b", "mean_d", "r_c", "r_b", "r_d", "delta90",
)
UNDIRECTED_MEASURES = (
    "wcc", "mean_degree", "gamma", "r", "mean_c", "mean_b", "mean_d",
    "r_c", "r_b", "r_d", "delta90",
)


def measure_names(directed: bool) -> tuple[str, ...]:
    return DIRECTED_MEASURES if directed else UNDIRECTED_MEASURES


@dataclass
class MeasureVector:
    """Canonically ordered measures of one network; ``None`` marks a missing value."""
    directed: bool
    values: dict[str, float | None]
    missing: dict[str, str] = field(default_factory=dict)
    nodes: int = 0
    links: int = 0
    extra: dict[str, float | None] = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, name):
        return self.values[name]

    def as_array(self) -> np.ndarray:
        return np.array([np.nan if v is None else v for v in self.values.values()])

    def to_json(self) -> dict:
        return {
            "directed": self.directed,
            "nodes": self.nodes,
            "links": self.links,
            "measures": dict(self.values),
            "missing": dict(sorted(self.missing.items())),
            "extra": dict(self.extra),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MeasureVector":
        names = measure_names(obj["directed"])
        return cls(obj["directed"], {k: obj["measures"].get(k) for k in names},
                   dict(obj.get("missing", {})), obj.get("nodes", 0), obj.get("links", 0),
                   dict(obj.get("extra", {})))


@dataclass
class MeasureDetails:
    """By-products kept for profile and hop-plot exports."""
    clustering: Clustering
    hop_plot: HopPlot


def _try(values, missing, name, fn, *args):
    try:
        values[name] = float(fn(*args))
    except (DegenerateTailError, UndefinedMixing, ValueError) as exc:
        values[name] = None
        missing[name] = str(exc)


def measure_vector(g: Graph, k_min: float = 10, realizations: int = 100, trials: int = 32,
                   seed: int = 42, alt_k_min: float | None = 25,
                   hop_plot: HopPlot | None = None, details: bool = False):
    """Compute the measure vector of ``g`` (20 entries directed, 11 undirected).

    Exponents use ``k_min``; those for ``alt_k_min`` go to ``extra``. With
    ``details=True`` returns ``(vector, MeasureDetails)``.
    """
    values: dict[str, float | None] = {}
    missing: dict[str, str] = {}
    extra: dict[str, float | None] = {}
    u = undirected_view(g)

    values["wcc"] = largest_wcc(g)[1]
    if g.directed:
        bt = bow_tie(g)
        values["in"], values["core"], values["out"] = bt.in_fraction, bt.core_fraction, bt.out_fraction
    values["mean_degree"] = float(g.degree().mean())

    degree_seqs = {"gamma": u.degree()}
    if g.directed:
        degree_seqs["gamma_in"] = g.in_degree()
        degree_seqs["gamma_out"] = g.out_degree()
    for name, deg in degree_seqs.items():
        _try(values, missing, name, powerlaw_exponent, deg, k_min)
        if alt_k_min is not None:
            alt_missing: dict[str, str] = {}
            _try(extra, alt_missing, f"{name}@kmin={alt_k_min:g}", powerlaw_exponent, deg, alt_k_min)

    _try(values, missing, "r", degree_mixing, u, "total", "total")
    if g.directed:
        for a in ("in", "out"):
            for b in ("in", "out"):
                _try(values, missing, f"r_{a}_{b}", degree_mixing, g, a, b)

    cl = clustering_coefficients(u)
    values["mean_c"] = float(cl.c.mean())
    values["mean_b"] = float(cl.b.mean())
    values["mean_d"] = float(cl.d.mean())
    for v in ("c", "b", "d"):
        _try(values, missing, f"r_{v}", clustering_mixing, u, v, cl)

    if hop_plot is None:
        hop_plot = hop_plot_anf(u, realizations, trials, seed)
    _try(values, missing, "delta90", effective_diameter, hop_plot)

    ordered = {name: values[name] for name in measure_names(g.directed)}
    mv = MeasureVector(g.directed, ordered, missing, g.node_count, g.link_count, extra)
    if details:
        return mv, MeasureDetails(cl, hop_plot)
    return mv
