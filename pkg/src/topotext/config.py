"""Pipeline configuration: a JSON-serializable record with pinned defaults.

Every report embeds `config_hash(cfg)` so results are traceable to the exact
settings that produced them; the diagram cache is keyed by the narrower
`diagram_hash`, which covers only the fields that influence diagrams, so
changing, say, a signature length does not invalidate cached diagrams.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError

_METRICS = ("euclidean", "angular")
_CLOUD_MODES = ("word", "sentence")
_FORMATS = ("word2vec-text", "glove-text")
_BLOCKS = ("ph", "aw2v", "tfidf", "aw2v+ph")


@dataclass
class PipelineConfig:
    corpus: str = ""
    embeddings: str = ""
    embedding_format: str = "word2vec-text"
    cache_dir: str = "cache"
    output_dir: str = "out"

    metric: str = "euclidean"
    normalize_vectors: bool = False
    lowercase: bool = True
    strip_headers: bool = True
    cloud_mode: str = "word"

    max_points: int = 256
    sample_seed: int = 0
    max_dim: int = 1
    threshold: float | str = "enclosing"
    simplex_budget: int = 5_000_000

    length_h0: int = 512
    length_h1: int = 512
    blocks: list[str] = field(default_factory=lambda: list(_BLOCKS))

    n_clusters: int | None = None  # default: number of gold classes
    lambda_grid: list[float] = field(default_factory=lambda: [1e-4, 1e-3, 1e-2, 1e-1])
    seed: int = 0
    test_fraction: float = 0.1
    min_df: int = 2
    standardize: bool = True
    baseline_trials: int = 100
    workers: int = 1

    def validate(self) -> "PipelineConfig":
        if not self.corpus:
            raise ConfigError("config: 'corpus' path is required")
        if not self.embeddings:
            raise ConfigError("config: 'embeddings' path is required")
        if self.embedding_format not in _FORMATS:
            raise ConfigError(f"config: embedding_format must be one of {_FORMATS}")
        if self.metric not in _METRICS:
            raise ConfigError(f"config: metric must be one of {_METRICS}")
        if self.cloud_mode not in _CLOUD_MODES:
            raise ConfigError(f"config: cloud_mode must be one of {_CLOUD_MODES}")
        if self.max_points < 1:
            raise ConfigError("config: max_points must be >= 1")
        if self.max_dim not in (0, 1, 2):
            raise ConfigError("config: max_dim must be 0, 1 or 2")
        if self.threshold != "enclosing":
            try:
                thr = float(self.threshold)
            except (TypeError, ValueError):
                raise ConfigError("config: threshold must be a number or 'enclosing'")
            if thr <= 0:
                raise ConfigError("config: threshold must be positive")
        if self.length_h0 < 1 or self.length_h1 < 1:
            raise ConfigError("config: signature lengths must be >= 1")
        unknown = [b for b in self.blocks if b not in _BLOCKS]
        if unknown:
            raise ConfigError(f"config: unknown feature blocks {unknown}; valid: {_BLOCKS}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("config: test_fraction must be in (0, 1)")
        if not self.lambda_grid:
            raise ConfigError("config: lambda_grid must be nonempty")
        if self.workers < 1:
            raise ConfigError("config: workers must be >= 1")
        if self.baseline_trials < 1:
            raise ConfigError("config: baseline_trials must be >= 1")
        if self.min_df < 1:
            raise ConfigError("config: min_df must be >= 1")
        return self

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"config {path}: unknown keys {unknown}")
        return cls(**raw).validate()

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# fields that never change results, only where/how fast they are computed
_NON_SEMANTIC = ("cache_dir", "output_dir", "workers")

_DIAGRAM_FIELDS = (
    "corpus", "embeddings", "embedding_format", "metric", "normalize_vectors",
    "lowercase", "strip_headers", "cloud_mode", "max_points", "sample_seed",
    "max_dim", "threshold", "simplex_budget",
)


def _digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def config_hash(cfg: PipelineConfig) -> str:
    payload = {k: v for k, v in cfg.to_dict().items() if k not in _NON_SEMANTIC}
    return _digest(payload)


def diagram_hash(cfg: PipelineConfig) -> str:
    payload = {k: v for k, v in cfg.to_dict().items() if k in _DIAGRAM_FIELDS}
    return _digest(payload)


_FEATURE_FIELDS = _DIAGRAM_FIELDS + ("length_h0", "length_h1", "min_df")


def features_hash(cfg: PipelineConfig) -> str:
    payload = {k: v for k, v in cfg.to_dict().items() if k in _FEATURE_FIELDS}
    return _digest(payload)
