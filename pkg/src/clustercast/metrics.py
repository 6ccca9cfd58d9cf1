"""Forecast error measures and cluster-size-weighted aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, LengthMismatch, UndefinedAtZero


@dataclass(frozen=True)
class ErrorTriple:
    """MAE, RMSE, and MAPE (percent) of one evaluation."""

    mae: float
    rmse: float
    mape: float

    @classmethod
    def of(cls, actual, predicted) -> "ErrorTriple":
        return cls(mae(actual, predicted), rmse(actual, predicted), mape(actual, predicted))


@dataclass(frozen=True)
class ClusterWeights:
    """Cluster sizes; weights are sizes normalized by their total."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise EmptyInput("need at least one cluster size")
        if any(s <= 0 for s in self.sizes):
            raise ValueError("cluster sizes must be positive")

    @property
    def weights(self) -> np.ndarray:
        sizes = np.asarray(self.sizes, dtype=float)
        return sizes / sizes.sum()


def _pair(actual, predicted):
    a = np.asarray(actual, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if a.shape != p.shape:
        raise LengthMismatch(f"actual has {a.size} values, predicted has {p.size}")
    if a.size == 0:
        raise EmptyInput("need at least one value")
    return a, p


def errors(actual, predicted) -> np.ndarray:
    """Element-wise actual minus predicted."""
    a, p = _pair(actual, predicted)
    return a - p


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    return float(np.mean(np.abs(errors(actual, predicted))))


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    e = errors(actual, predicted)
    return float(np.sqrt(np.mean(e * e)))


def mape(actual, predicted) -> float:
    """Mean absolute percentage error.

    Raises UndefinedAtZero when any actual value is zero; silently skipping
    those points would bias comparisons.
    """
    a, p = _pair(actual, predicted)
    if np.any(a == 0.0):
        raise UndefinedAtZero("actual values contain zero")
    return float(np.mean(np.abs(100.0 * (a - p) / a)))


def weighted_total(weights, per_cluster_errors) -> float:
    """Size-weighted average of per-cluster errors: sum_i (size_i/total) * E_i."""
    if not isinstance(weights, ClusterWeights):
        weights = ClusterWeights(tuple(weights))
    e = np.asarray(per_cluster_errors, dtype=float).ravel()
    if e.size != len(weights.sizes):
        raise LengthMismatch(
            f"{len(weights.sizes)} cluster sizes but {e.size} error values"
        )
    return float(np.dot(weights.weights, e))
