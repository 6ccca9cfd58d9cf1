"""Seeded synthetic dataset generation.

Each measurement column is built in five steps: simulate an ARMA process,
take absolute values and rescale into the column's target range, (for columns
past the third) substitute a piecewise-constant profile, inject spike and
zero outliers, and add white Gaussian noise. Static features are uniform
draws per declared range. Everything is a pure function of the config,
including its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import Dataset, Schema, SeriesRecord
from .errors import (
    ConfigError,
    DegenerateRange,
    NonStationary,
    OutOfRange,
    TooManyOutliers,
)

DEFAULT_COLUMNS = ("oil", "water", "gas")

# Value ranges keep min well above zero relative to the spread, so that a
# zero outlier is far outside the remainder distribution of a smoothed
# column and the downstream detector can see it.
DEFAULT_VALUE_RANGES = ((1200.0, 2000.0), (300.0, 500.0), (60000.0, 100000.0))

# Noise at one percent of each column's span.
DEFAULT_NOISE_STD = (8.0, 2.0, 400.0)

DEFAULT_STATIC_RANGES = (
    (0.1, 0.9),
    (10.0, 100.0),
    (1000.0, 5000.0),
    (1.0, 50.0),
    (100.0, 300.0),
)


@dataclass(frozen=True)
class GenConfig:
    """Generation parameters; the seed makes output fully reproducible."""

    n_records: int = 400
    n_columns: int = 3
    length: int = 400
    ar_order_range: tuple[int, int] = (1, 3)
    ma_order_range: tuple[int, int] = (1, 3)
    value_ranges: tuple[tuple[float, float], ...] = DEFAULT_VALUE_RANGES
    n_spike_outliers: int = 6
    n_zero_outliers: int = 4
    noise_std: tuple[float, ...] = DEFAULT_NOISE_STD
    static_dim: int = 5
    static_ranges: tuple[tuple[float, float], ...] = DEFAULT_STATIC_RANGES
    seed: int = 0
    column_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n_records < 1 or self.n_columns < 1 or self.length < 1:
            raise ConfigError("record count, column count, and length must be positive")
        if self.n_spike_outliers < 0 or self.n_zero_outliers < 0:
            raise ConfigError("outlier counts must be nonnegative")
        if self.n_spike_outliers + self.n_zero_outliers > self.length:
            raise ConfigError("more outliers than points in a column")
        if len(self.value_ranges) != self.n_columns:
            raise ConfigError("need one value range per column")
        for lo, hi in self.value_ranges:
            if not (0 < lo < hi):
                raise ConfigError("value ranges must satisfy 0 < min < max")
        if len(self.noise_std) != self.n_columns:
            raise ConfigError("need one noise level per column")
        if any(s < 0 for s in self.noise_std):
            raise ConfigError("noise levels must be nonnegative")
        if self.static_dim < 1:
            raise ConfigError("static dimension must be positive")
        if len(self.static_ranges) != self.static_dim:
            raise ConfigError("need one range per static feature")
        for lo, hi in self.ar_order_range, self.ma_order_range:
            if not (1 <= lo <= hi):
                raise ConfigError("order ranges must satisfy 1 <= low <= high")
        names = self.column_names or _default_names(self.n_columns)
        if len(names) != self.n_columns:
            raise ConfigError("need one name per column")
        object.__setattr__(self, "column_names", tuple(names))

    @property
    def target_column(self) -> str:
        """The forecast target: the third column when present, else the last."""
        return self.column_names[min(2, self.n_columns - 1)]


def _default_names(n_columns: int) -> tuple[str, ...]:
    names = list(DEFAULT_COLUMNS[:n_columns])
    names += [f"aux{i + 1}" for i in range(len(names), n_columns)]
    return tuple(names)


@dataclass(frozen=True)
class OutlierEntry:
    index: int
    kind: str  # "spike" or "zero"
    original_value: float


@dataclass(frozen=True)
class OutlierLog:
    """Injected outlier positions: (record id, column) -> entries sorted by index."""

    entries: dict[tuple[str, str], tuple[OutlierEntry, ...]] = field(default_factory=dict)

    def for_column(self, record_id: str, column: str) -> tuple[OutlierEntry, ...]:
        return self.entries.get((record_id, column), ())

    def counts(self, record_id: str, column: str) -> tuple[int, int]:
        ent = self.for_column(record_id, column)
        spikes = sum(1 for e in ent if e.kind == "spike")
        return spikes, len(ent) - spikes


def _check_stationary(coeffs: np.ndarray) -> bool:
    """True when the lag polynomial's characteristic roots lie inside the unit circle."""
    if len(coeffs) == 0:
        return True
    roots = np.roots(np.concatenate(([1.0], -np.asarray(coeffs, dtype=float))))
    return bool(np.all(np.abs(roots) < 1.0))


def _check_invertible(coeffs: np.ndarray) -> bool:
    if len(coeffs) == 0:
        return True
    roots = np.roots(np.concatenate(([1.0], np.asarray(coeffs, dtype=float))))
    return bool(np.all(np.abs(roots) < 1.0))


def simulate_arima(ar, ma, length: int, noise_std: float, rng: np.random.Generator):
    """Simulate an ARMA(p, q) sequence with Gaussian innovations.

    A burn-in of 10x the larger order is generated and discarded so the
    output starts near the stationary distribution. Supplying AR coefficients
    whose characteristic roots reach the unit circle raises NonStationary.
    """
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    if length < 1:
        raise OutOfRange("length must be positive")
    if not _check_stationary(ar):
        raise NonStationary(f"AR coefficients {ar.tolist()} are not stationary")
    p, q = len(ar), len(ma)
    burn = 10 * max(p, q)
    total = burn + length
    eps = rng.normal(0.0, noise_std, size=total + q)
    x = np.zeros(total)
    for t in range(total):
        val = eps[t + q]
        for i in range(p):
            if t - 1 - i >= 0:
                val += ar[i] * x[t - 1 - i]
        for j in range(q):
            val += ma[j] * eps[t + q - 1 - j]
        x[t] = val
    return x[burn:]


def rescale_positive(seq, target_min: float, target_max: float) -> np.ndarray:
    """Absolute value, then affine map so the min and max hit the target range."""
    x = np.abs(np.asarray(seq, dtype=float))
    lo, hi = x.min(), x.max()
    if hi == lo:
        raise DegenerateRange("cannot rescale a constant sequence")
    return target_min + (x - lo) * ((target_max - target_min) / (hi - lo))


def piecewise_column(c1: float, c2: float, t1: int, length: int) -> np.ndarray:
    """Constant c1 for the first t1 points, then constant c2."""
    if not 0 <= t1 <= length:
        raise OutOfRange(f"breakpoint must be in [0, {length}], got {t1}")
    out = np.full(length, float(c2))
    out[:t1] = c1
    return out


def inject_outliers(seq, n_spikes: int, n_zeros: int, rng: np.random.Generator):
    """Replace sampled positions with large spikes and zeros.

    Spikes draw uniformly from (1.5x, 3x) the pre-injection maximum; zeros
    are exact. Positions are sampled without replacement and every change is
    logged with its original value.
    """
    x = np.asarray(seq, dtype=float).copy()
    total = n_spikes + n_zeros
    if total > len(x):
        raise TooManyOutliers(f"{total} outliers requested for {len(x)} points")
    if total == 0:
        return x, ()
    idx = rng.choice(len(x), size=total, replace=False)
    mx = x.max()
    entries = []
    for i in idx[:n_spikes]:
        entries.append(OutlierEntry(int(i), "spike", float(x[i])))
        x[i] = rng.uniform(1.5 * mx, 3.0 * mx)
    for i in idx[n_spikes:]:
        entries.append(OutlierEntry(int(i), "zero", float(x[i])))
        x[i] = 0.0
    entries.sort(key=lambda e: e.index)
    return x, tuple(entries)


def add_awgn(seq, noise_std: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise with the given standard deviation."""
    x = np.asarray(seq, dtype=float)
    if noise_std == 0:
        return x.copy()
    return x + rng.normal(0.0, noise_std, size=len(x))


def generate_static(n_records: int, static_dim: int, ranges, rng: np.random.Generator):
    """Uniform static feature matrix, one declared range per feature."""
    if len(ranges) != static_dim:
        raise ConfigError("need one range per static feature")
    out = np.empty((n_records, static_dim))
    for j, (lo, hi) in enumerate(ranges):
        out[:, j] = rng.uniform(lo, hi, size=n_records)
    return out


def _draw_coefficients(order_range, rng, check) -> np.ndarray:
    order = int(rng.integers(order_range[0], order_range[1] + 1))
    while True:
        coeffs = rng.uniform(-1.0, 1.0, size=order)
        if check(coeffs):
            return coeffs


def _generate_column(cfg: GenConfig, col_idx: int, rng: np.random.Generator):
    lo, hi = cfg.value_ranges[col_idx]
    if col_idx < 3:
        ar = _draw_coefficients(cfg.ar_order_range, rng, _check_stationary)
        ma = _draw_coefficients(cfg.ma_order_range, rng, _check_invertible)
        raw = simulate_arima(ar, ma, cfg.length, 1.0, rng)
        base = rescale_positive(raw, lo, hi)
    else:
        # auxiliary columns switch between two constant levels
        c1, c2 = rng.uniform(lo, hi, size=2)
        t1 = int(rng.integers(0, cfg.length + 1))
        base = piecewise_column(c1, c2, t1, cfg.length)
    injected, log_entries = inject_outliers(
        base, cfg.n_spike_outliers, cfg.n_zero_outliers, rng
    )
    noisy = add_awgn(injected, cfg.noise_std[col_idx], rng)
    return noisy, log_entries


def generate_dataset(cfg: GenConfig) -> tuple[Dataset, OutlierLog]:
    """Generate the full dataset and the log of injected outliers.

    Each record draws from its own child seed, so generation order (or
    parallel generation) cannot change the output.
    """
    root = np.random.SeedSequence(cfg.seed)
    children = root.spawn(cfg.n_records)
    records = []
    log: dict[tuple[str, str], tuple[OutlierEntry, ...]] = {}
    for i, child in enumerate(children):
        streams = child.spawn(cfg.n_columns + 1)
        record_id = f"r{i:04d}"
        measurements = {}
        for c, name in enumerate(cfg.column_names):
            rng = np.random.default_rng(streams[c])
            col, entries = _generate_column(cfg, c, rng)
            measurements[name] = col
            if entries:
                log[(record_id, name)] = entries
        static_rng = np.random.default_rng(streams[-1])
        static = generate_static(1, cfg.static_dim, cfg.static_ranges, static_rng)[0]
        records.append(SeriesRecord(record_id, measurements, static))
    schema = Schema(cfg.column_names, cfg.length, cfg.static_dim)
    return Dataset(tuple(records), schema, seed=cfg.seed), OutlierLog(log)


def desk_config(seed: int = 0) -> GenConfig:
    """Small configuration for fast end-to-end runs."""
    return GenConfig(n_records=100, length=200, seed=seed)


def full_config(seed: int = 0) -> GenConfig:
    """Full-size configuration: 400 records, 3 columns of length 400, 5 static features."""
    return GenConfig(seed=seed)


def with_seed(cfg: GenConfig, seed: int) -> GenConfig:
    return replace(cfg, seed=seed)
