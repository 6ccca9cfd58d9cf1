"""Experiment configuration: the full grid one run will cover, plus profiles.

A run crosses clustering methods with models and horizons; every
(method, cluster, model, horizon) cell is cross-validated independently.
The desk profile keeps runtimes in minutes; the full profile mirrors the
400-record scale and default hyperparameters.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields

from ..datagen import GenConfig, desk_config, full_config
from ..errors import ConfigError
from ..forecast.models import ARCHITECTURES

CLUSTERING_METHODS = ("none", "dtw", "feature_a", "feature_b")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; identical configs give identical numbers."""

    gen: GenConfig | None = None
    dataset_path: str | None = None
    clean: bool = True
    clean_span: float = 0.25
    clustering: tuple[str, ...] = ("none",)
    k: int | None = None
    k_range: tuple[int, int] = (2, 6)
    measurement_selection: tuple[str, ...] | None = None
    target_column: str | None = None
    models: tuple[str, ...] = ("M1", "M3")
    horizons: tuple[int, ...] = (75, 100)
    n_train: int = 50
    folds: int = 5
    seed: int = 0
    hidden: int = 16
    window: int = 12
    epochs: int = 40
    batch_size: int = 16
    learning_rate: float = 5e-3
    out_dir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        if (self.gen is None) == (self.dataset_path is None):
            raise ConfigError("provide exactly one of gen or dataset_path")
        object.__setattr__(self, "clustering", tuple(self.clustering))
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "horizons", tuple(int(k) for k in self.horizons))
        for method in self.clustering:
            if method not in CLUSTERING_METHODS:
                raise ConfigError(
                    f"unknown clustering method {method!r}; choose from {CLUSTERING_METHODS}"
                )
        if len(set(self.clustering)) != len(self.clustering) or not self.clustering:
            raise ConfigError("clustering methods must be non-empty and unique")
        for model in self.models:
            if model not in ARCHITECTURES:
                raise ConfigError(f"unknown model {model!r}; choose from {ARCHITECTURES}")
        if not self.models:
            raise ConfigError("need at least one model")
        if not self.horizons:
            raise ConfigError("need at least one horizon")
        for k in self.horizons:
            if k <= self.n_train:
                raise ConfigError(f"horizon {k} must exceed n_train {self.n_train}")
        if self.n_train < 1:
            raise ConfigError("n_train must be positive")
        if self.window > self.n_train:
            raise ConfigError(
                f"window {self.window} does not fit in the {self.n_train}-point prefix"
            )
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be positive")
        lo, hi = self.k_range
        if not 2 <= lo <= hi:
            raise ConfigError("k_range must satisfy 2 <= lo <= hi")
        if not 0 < self.clean_span <= 1:
            raise ConfigError("clean_span must be in (0, 1]")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")
        if self.measurement_selection is not None:
            object.__setattr__(
                self, "measurement_selection", tuple(self.measurement_selection)
            )

    def fingerprint(self) -> str:
        """Hash of every number-determining field; times and paths excluded."""
        doc = asdict(self)
        doc.pop("out_dir")
        doc.pop("jobs")
        canon = json.dumps(doc, sort_keys=True, default=str)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def desk_profile(seed: int = 0, out_dir: str = "out", **overrides) -> ExperimentConfig:
    """Minutes-scale run: 100 records of length 200, two models, two horizons."""
    base = dict(
        gen=desk_config(seed),
        clustering=("none", "feature_a"),
        models=("M1", "M3"),
        horizons=(75, 100),
        n_train=50,
        folds=5,
        seed=seed,
        hidden=16,
        window=12,
        epochs=40,
        batch_size=16,
        learning_rate=5e-3,
        out_dir=out_dir,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def full_profile(seed: int = 0, out_dir: str = "out", **overrides) -> ExperimentConfig:
    """Full-scale run: 400 records of length 400, all models and methods."""
    base = dict(
        gen=full_config(seed),
        clustering=CLUSTERING_METHODS,
        models=ARCHITECTURES,
        horizons=(150, 200, 300, 400),
        n_train=100,
        folds=5,
        seed=seed,
        hidden=32,
        window=24,
        epochs=200,
        batch_size=32,
        learning_rate=1e-3,
        out_dir=out_dir,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


PROFILES = {"desk": desk_profile, "full": full_profile}

_TUPLE_OF_PAIRS = ("value_ranges", "static_ranges")
_TUPLES = ("ar_order_range", "ma_order_range", "noise_std", "column_names")


def gen_config_to_dict(cfg: GenConfig) -> dict:
    return asdict(cfg)


def gen_config_from_dict(doc: dict) -> GenConfig:
    kwargs = dict(doc)
    for name in _TUPLE_OF_PAIRS:
        if name in kwargs and kwargs[name] is not None:
            kwargs[name] = tuple(tuple(pair) for pair in kwargs[name])
    for name in _TUPLES:
        if name in kwargs and kwargs[name] is not None:
            kwargs[name] = tuple(kwargs[name])
    return GenConfig(**kwargs)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    doc = asdict(cfg)
    doc["gen"] = gen_config_to_dict(cfg.gen) if cfg.gen is not None else None
    return doc


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a config from parsed JSON, with an optional ``profile`` base."""
    kwargs = dict(doc)
    profile = kwargs.pop("profile", None)
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(kwargs) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if kwargs.get("gen") is not None:
        kwargs["gen"] = gen_config_from_dict(kwargs["gen"])
    for name in ("clustering", "models", "horizons", "k_range", "measurement_selection"):
        if kwargs.get(name) is not None:
            kwargs[name] = tuple(kwargs[name])
    if profile is not None:
        if profile not in PROFILES:
            raise ConfigError(f"unknown profile {profile!r}; choose from {tuple(PROFILES)}")
        return PROFILES[profile](**kwargs)
    return ExperimentConfig(**kwargs)
