"""Shared domain types, supervised windowing, prefix splits, and standardization.

A record is one multivariate series: named measurement columns of equal
length plus a static feature vector. Missing values are NaN, which keeps them
distinct from every legitimate reading (the generated data is positive, and
zero is a legal outlier value, so no real sentinel would be safe).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyInput, OutOfRange, SchemaError, TooShort

MISSING = np.nan


def is_missing(values) -> np.ndarray:
    """Boolean mask of missing entries."""
    return np.isnan(np.asarray(values, dtype=float))


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise SchemaError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Schema:
    """Column names, series length, and static dimension shared by a dataset."""

    columns: tuple[str, ...]
    length: int
    static_dim: int

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise SchemaError("duplicate measurement column names")
        if self.length < 1:
            raise SchemaError("series length must be at least 1")
        if self.static_dim < 0:
            raise SchemaError("static dimension must be nonnegative")


@dataclass(frozen=True)
class SeriesRecord:
    """One multivariate time series plus its static feature vector."""

    id: str
    measurements: Mapping[str, np.ndarray]
    static_features: np.ndarray

    def __post_init__(self):
        cleaned = {}
        length = None
        for name, col in self.measurements.items():
            arr = _as_float_vector(col, f"column {name!r}")
            if length is None:
                length = len(arr)
            elif len(arr) != length:
                raise SchemaError(
                    f"column {name!r} has length {len(arr)}, expected {length}"
                )
            cleaned[name] = arr
        if length is None or length < 1:
            raise SchemaError("a record needs at least one non-empty column")
        object.__setattr__(self, "measurements", cleaned)
        object.__setattr__(
            self, "static_features", _as_float_vector(self.static_features, "static_features")
        )

    @property
    def length(self) -> int:
        return len(next(iter(self.measurements.values())))

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(self.measurements)

    def with_measurements(self, measurements: Mapping[str, np.ndarray]) -> "SeriesRecord":
        """Copy of this record with some columns replaced."""
        merged = dict(self.measurements)
        merged.update(measurements)
        return SeriesRecord(self.id, merged, self.static_features)

    def stacked(self, columns: Sequence[str] | None = None) -> np.ndarray:
        """Selected columns as an (L, d) array in the given order."""
        names = list(columns) if columns is not None else list(self.measurements)
        return np.column_stack([self.measurements[c] for c in names])


@dataclass(frozen=True)
class Dataset:
    """A collection of records sharing one schema."""

    records: tuple[SeriesRecord, ...]
    schema: Schema
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise SchemaError("record ids must be unique")
        for rec in self.records:
            if rec.columns != self.schema.columns:
                raise SchemaError(f"record {rec.id!r} columns do not match schema")
            if rec.length != self.schema.length:
                raise SchemaError(
                    f"record {rec.id!r} has length {rec.length}, "
                    f"schema says {self.schema.length}"
                )
            if len(rec.static_features) != self.schema.static_dim:
                raise SchemaError(
                    f"record {rec.id!r} has {len(rec.static_features)} static features, "
                    f"schema says {self.schema.static_dim}"
                )

    def __len__(self) -> int:
        return len(self.records)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.records[i] for i in indices), self.schema, self.seed)


@dataclass(frozen=True)
class SupervisedSet:
    """Windowed training examples.

    ``inputs`` is a flat matrix: each row is a window of ``window_length``
    values per series column (columns interleaved window-first), optionally
    followed by ``static_dim`` static features.
    """

    inputs: np.ndarray
    targets: np.ndarray
    window_length: int
    horizon: int
    n_series_columns: int = 1
    static_dim: int = 0

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if inputs.ndim != 2 or targets.ndim != 1 or inputs.shape[0] != targets.shape[0]:
            raise SchemaError("inputs must be (n, f) and targets (n,)")
        expected = self.window_length * self.n_series_columns + self.static_dim
        if inputs.shape[1] != expected:
            raise SchemaError(
                f"inputs have {inputs.shape[1]} columns, expected {expected}"
            )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return len(self.targets)

    def dynamic(self) -> np.ndarray:
        """Window part reshaped to (n, window_length, n_series_columns)."""
        n = len(self)
        w, d = self.window_length, self.n_series_columns
        return self.inputs[:, : w * d].reshape(n, w, d)

    def static(self) -> np.ndarray | None:
        """Static part as (n, static_dim), or None when absent."""
        if self.static_dim == 0:
            return None
        return self.inputs[:, -self.static_dim :]


def make_supervised(series, w: int, h: int) -> SupervisedSet:
    """Slide a window of length w over a series; the target sits h steps ahead.

    Example i pairs input series[i : i+w] with target series[i+w+h-1], giving
    len(series) - w - h + 1 examples.
    """
    x = _as_float_vector(series, "series")
    if w < 1 or h < 1:
        raise OutOfRange("window and horizon must be positive")
    if np.isnan(x).any():
        raise ValueError("series contains missing values; impute first")
    n = len(x) - w - h + 1
    if n < 1:
        raise TooShort(f"need at least {w + h} values, got {len(x)}")
    idx = np.arange(w)[None, :] + np.arange(n)[:, None]
    return SupervisedSet(
        inputs=x[idx],
        targets=x[np.arange(n) + w + h - 1],
        window_length=w,
        horizon=h,
    )


def split_prefix(record: SeriesRecord, n: int):
    """First n values of every column and the remainder, as two column maps."""
    if not 0 < n < record.length:
        raise OutOfRange(f"prefix length must be in (0, {record.length}), got {n}")
    prefix = {name: col[:n] for name, col in record.measurements.items()}
    remainder = {name: col[n:] for name, col in record.measurements.items()}
    return prefix, remainder


@dataclass(frozen=True)
class Standardizer:
    """Per-column affine transform to zero mean and unit spread.

    Uses population (1/n) standard deviation. Zero-variance columns keep a
    divisor of 1 so constants map to zero and invert exactly.
    """

    mean: np.ndarray
    std: np.ndarray

    def apply(self, matrix) -> np.ndarray:
        return (np.asarray(matrix, dtype=float) - self.mean) / self.std

    def invert(self, matrix) -> np.ndarray:
        return np.asarray(matrix, dtype=float) * self.std + self.mean


def fit_standardizer(matrix) -> Standardizer:
    """Fit column means and population standard deviations."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.size == 0:
        raise EmptyInput("cannot standardize an empty matrix")
    mean = m.mean(axis=0)
    std = m.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return Standardizer(mean=mean, std=std)
