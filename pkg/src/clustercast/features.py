"""Per-series feature catalogs and feature-matrix assembly.

Catalog A holds time-series statistics: spectral entropy, autocorrelations,
partial autocorrelations, tile stability, and Holt smoothing parameters.
Catalog B holds signal statistics: energy, moments, leading FFT magnitudes,
and Ricker wavelet responses at several widths. Both catalogs are fixed name
lists so feature matrices are comparable across runs; the lists are printed
into reports.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _native
from .core import Dataset, Standardizer, fit_standardizer
from .errors import TooShort, ZeroVariance

CATALOG_A = (
    "spectral_entropy",
    "acf_1",
    "acf_10",
    "pacf_1",
    "pacf_5",
    "stability",
    "holt_alpha",
    "holt_beta",
)

CATALOG_B = (
    "abs_energy",
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "fft_mag_1",
    "fft_mag_2",
    "fft_mag_3",
    "fft_mag_4",
    "fft_mag_5",
    "cwt_w2",
    "cwt_w5",
    "cwt_w10",
    "cwt_w20",
)

CATALOGS = {"A": CATALOG_A, "B": CATALOG_B}

HOLT_GRID = np.arange(21) / 20.0  # alpha, beta in {0, 0.05, ..., 1}

CWT_WIDTHS = (2, 5, 10, 20)

STABILITY_TILES = 10


def _validate(seq, min_length: int = 1) -> np.ndarray:
    x = np.asarray(seq, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a one-dimensional series, got shape {x.shape}")
    if len(x) < min_length:
        raise TooShort(f"need at least {min_length} values, got {len(x)}")
    if np.isnan(x).any():
        raise ValueError("series contains missing values; impute first")
    return x


def acf(seq, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..max_lag with 1/n normalization.

    The lag-0 value is 1 by definition and not returned.
    """
    x = _validate(seq, max_lag + 1)
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    centered = x - x.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise ZeroVariance("autocorrelation of a constant series is undefined")
    return np.array(
        [np.dot(centered[k:], centered[:-k]) / denom for k in range(1, max_lag + 1)]
    )


def pacf(seq, max_lag: int) -> np.ndarray:
    """Partial autocorrelations via the Durbin-Levinson recursion.

    Lag 1 equals the lag-1 autocorrelation exactly. If the recursion's
    innovation variance collapses, remaining lags are reported as 0.
    """
    r = acf(seq, max_lag)
    out = np.zeros(max_lag)
    out[0] = r[0]
    phi = np.array([r[0]])
    denom = 1.0 - r[0] * r[0]
    for k in range(2, max_lag + 1):
        if denom <= 1e-12:
            break
        num = r[k - 1] - np.dot(phi, r[k - 2 :: -1])
        phi_kk = num / denom
        out[k - 1] = phi_kk
        phi = np.concatenate([phi - phi_kk * phi[::-1], [phi_kk]])
        denom *= 1.0 - phi_kk * phi_kk
    return out


def spectral_entropy(seq) -> float:
    """Shannon entropy of the normalized periodogram, scaled into [0, 1].

    The mean is removed first; entropy is taken over the positive-frequency
    bins and divided by the log of the bin count, so a flat spectrum scores
    near 1 and a single dominant frequency scores near 0.
    """
    x = _validate(seq, 4)
    spectrum = np.abs(np.fft.rfft(x - x.mean())[1:]) ** 2
    total = spectrum.sum()
    if total == 0.0:
        raise ZeroVariance("spectral entropy of a constant series is undefined")
    p = spectrum / total
    nonzero = p[p > 0]
    return float(-(nonzero * np.log(nonzero)).sum() / np.log(len(p)))


def stability(seq, n_tiles: int = STABILITY_TILES) -> float:
    """Variance of the means of near-equal contiguous tiles."""
    x = _validate(seq, 1)
    if n_tiles < 1:
        raise ValueError("n_tiles must be positive")
    if n_tiles > len(x):
        raise TooShort(f"cannot split {len(x)} values into {n_tiles} tiles")
    means = np.array([tile.mean() for tile in np.array_split(x, n_tiles)])
    return float(means.var())


def holt_sse(seq, alpha: float, beta: float) -> float:
    """One-step-ahead squared-error total of Holt's linear smoothing.

    Level starts at the first value and trend at the first difference;
    predictions are scored from the second point onward.
    """
    x = _validate(seq, 3)
    level, trend = x[0], x[1] - x[0]
    sse = 0.0
    for t in range(1, len(x)):
        pred = level + trend
        err = x[t] - pred
        sse += err * err
        new_level = alpha * x[t] + (1.0 - alpha) * pred
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        level = new_level
    return sse


def fit_holt(seq) -> tuple[float, float]:
    """Grid-search Holt's smoothing parameters.

    Scans alpha, beta over {0, 0.05, ..., 1} and returns the pair with the
    smallest one-step-ahead squared error; ties go to the smallest alpha,
    then the smallest beta.
    """
    x = _validate(seq, 3)
    grid = _native.holt_sse_grid(np.ascontiguousarray(x), HOLT_GRID, HOLT_GRID)
    ia, ib = np.unravel_index(np.argmin(grid), grid.shape)
    return float(HOLT_GRID[ia]), float(HOLT_GRID[ib])


def _ricker(width: float, length: int) -> np.ndarray:
    """Ricker (Mexican hat) wavelet sampled at integer offsets."""
    t = np.arange(length) - (length - 1) / 2.0
    amp = 2.0 / (np.sqrt(3.0 * width) * np.pi**0.25)
    u = t / width
    return amp * (1.0 - u * u) * np.exp(-(u * u) / 2.0)


def cwt_mean_abs(seq, width: float) -> float:
    """Mean absolute Ricker-wavelet response at one width."""
    x = _validate(seq, 1)
    kernel = _ricker(width, min(int(10 * width), len(x)))
    return float(np.abs(np.convolve(x, kernel, mode="same")).mean())


def _next_pow2(n: int) -> int:
    return 1 << max(4, (n - 1).bit_length())


def fft_magnitudes(seq, n_coeffs: int = 5) -> np.ndarray:
    """Magnitudes of the first FFT coefficients above DC.

    The mean is removed and the series zero-padded to the next power of two
    (at least 16) before the transform.
    """
    x = _validate(seq, 2)
    padded = np.zeros(_next_pow2(len(x)))
    padded[: len(x)] = x - x.mean()
    return np.abs(np.fft.rfft(padded)[1 : n_coeffs + 1])


@dataclass(frozen=True)
class FeatureVector:
    """Ordered feature name -> value map for one series."""

    catalog: str
    names: tuple[str, ...]
    values: np.ndarray
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.names) != len(self.values):
            raise ValueError("feature names and values must align")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("features must be finite")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))


def method_a(seq) -> FeatureVector:
    """Time-series statistics catalog (8 features).

    A constant series has no defined correlations or spectrum; those entries
    fall back to 0 and the fallback is noted in the vector's warnings.
    """
    x = _validate(seq, 11)  # acf_10 needs eleven points
    warnings = []
    constant = np.all(x == x[0])
    if constant:
        ent, a, p = 0.0, np.zeros(10), np.zeros(5)
        warnings.append("constant series: correlation and entropy features set to 0")
    else:
        ent = spectral_entropy(x)
        a = acf(x, 10)
        p = pacf(x, 5)
    alpha, beta = fit_holt(x)
    values = [ent, a[0], a[9], p[0], p[4], stability(x), alpha, beta]
    return FeatureVector("A", CATALOG_A, np.array(values), tuple(warnings))


def method_b(seq) -> FeatureVector:
    """Signal statistics catalog (14 features).

    Constant series fall back to 0 for the moment ratios, mirroring the
    catalog-A rule for undefined statistics.
    """
    x = _validate(seq, 4)
    warnings = []
    m2 = float(x.var())
    centered = x - x.mean()
    if m2 == 0.0:
        skew, kurt = 0.0, 0.0
        warnings.append("constant series: moment ratios set to 0")
    else:
        skew = float((centered**3).mean() / m2**1.5)
        kurt = float((centered**4).mean() / m2**2 - 3.0)
    values = [
        float(np.dot(x, x)),
        float(x.mean()),
        m2,
        skew,
        kurt,
        *fft_magnitudes(x, 5).tolist(),
        *[cwt_mean_abs(x, w) for w in CWT_WIDTHS],
    ]
    return FeatureVector("B", CATALOG_B, np.array(values), tuple(warnings))


@dataclass(frozen=True)
class FeatureMatrix:
    """One standardized row of concatenated per-column features per record."""

    values: np.ndarray
    feature_names: tuple[str, ...]
    record_ids: tuple[str, ...]
    catalog: str
    standardizer: Standardizer
    seconds: float = 0.0
    warnings: tuple[str, ...] = ()


def build_feature_matrix(
    dataset: Dataset, catalog: str, measurement_selection: Sequence[str] | None = None
) -> FeatureMatrix:
    """Extract one catalog over selected columns of every record, standardized.

    Feature columns are named ``<measurement>__<feature>``, ordered by the
    selection then the catalog. Wall-clock time is recorded on the result.
    """
    if catalog not in CATALOGS:
        raise ValueError(f"unknown catalog {catalog!r}; choose from {tuple(CATALOGS)}")
    columns = (
        tuple(measurement_selection)
        if measurement_selection is not None
        else dataset.schema.columns
    )
    for name in columns:
        if name not in dataset.schema.columns:
            raise ValueError(f"unknown column {name!r}")
    extract = method_a if catalog == "A" else method_b
    start = time.perf_counter()
    names = tuple(
        f"{col}__{feat}" for col in columns for feat in CATALOGS[catalog]
    )
    rows = []
    warnings = []
    for rec in dataset.records:
        parts = []
        for col in columns:
            fv = extract(rec.measurements[col])
            parts.append(fv.values)
            warnings.extend(f"{rec.id}/{col}: {w}" for w in fv.warnings)
        rows.append(np.concatenate(parts))
    raw = np.vstack(rows)
    standardizer = fit_standardizer(raw)
    values = standardizer.apply(raw)
    elapsed = time.perf_counter() - start
    return FeatureMatrix(
        values=values,
        feature_names=names,
        record_ids=tuple(r.id for r in dataset.records),
        catalog=catalog,
        standardizer=standardizer,
        seconds=elapsed,
        warnings=tuple(warnings),
    )
