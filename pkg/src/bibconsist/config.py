from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .ingest import FORMATS, PARADIGMS


class ConfigError(ValueError):
    pass


@dataclass
class DatasetSpec:
    name: str
    path: str
    format: str = "jsonl"
    paradigms: list[str] = field(default_factory=lambda: list(PARADIGMS))


@dataclass
class RunConfig:
    datasets: list[DatasetSpec]
    out: str = "out"
    seed: int = 42
    k_min: float = 10
    alt_k_min: float = 25
    anf_realizations: int = 100
    anf_trials: int = 32
    n_samples: int = 5000
    sample_size: int = 250
    alpha: float = 0.1
    nemenyi_q: float = 2.59
    mds_dims: list[int] = field(default_factory=lambda: [2, 3])
    mds_restarts: int = 20
    normalization: str = "zscore"
    base_dir: str = "."

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigError("dataset names must be unique")
        for d in self.datasets:
            if d.format not in FORMATS:
                raise ConfigError(f"{d.name}: unknown format {d.format!r}")
            for p in d.paradigms:
                if p not in PARADIGMS:
                    raise ConfigError(f"{d.name}: unknown paradigm {p!r}")
        for p in self.mds_dims:
            if p not in (2, 3):
                raise ConfigError("MDS dimensions must be 2 or 3")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def out_dir(self) -> Path:
        return self.resolve(self.out)

    def paradigms(self) -> list[str]:
        seen = {p for d in self.datasets for p in d.paradigms}
        return [p for p in PARADIGMS if p in seen]

    def to_json(self) -> dict:
        obj = asdict(self)
        # output location is not part of the analysis
        obj.pop("base_dir")
        obj.pop("out")
        return obj


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(obj, base_dir=str(path.parent))


def config_from_dict(obj: dict, base_dir: str = ".") -> RunConfig:
    obj = dict(obj)
    try:
        datasets = [DatasetSpec(**d) for d in obj.pop("datasets", [])]
        return RunConfig(datasets=datasets, base_dir=base_dir, **obj)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
