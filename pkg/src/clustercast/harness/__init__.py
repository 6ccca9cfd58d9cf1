"""Experiment orchestration: configuration, persistence, CLI."""

from .config import (
    CLUSTERING_METHODS,
    ExperimentConfig,
    config_from_dict,
    config_to_dict,
    desk_profile,
    full_profile,
)
from .experiment import (
    CellResult,
    ClusteringOutcome,
    ErrorReport,
    StopRequested,
    assign_clusters,
    run_ablation,
    run_experiment,
)
from .io import load_dataset, load_outlier_log, save_dataset, save_outlier_log

__all__ = [
    "CLUSTERING_METHODS",
    "CellResult",
    "ClusteringOutcome",
    "ErrorReport",
    "ExperimentConfig",
    "StopRequested",
    "assign_clusters",
    "config_from_dict",
    "config_to_dict",
    "desk_profile",
    "load_dataset",
    "load_outlier_log",
    "full_profile",
    "run_ablation",
    "run_experiment",
    "save_dataset",
    "save_outlier_log",
]
