"""Anomaly detection via trend decomposition, plus missing-value imputation.

Detection smooths the series with locally weighted linear regression, splits
it into trend, seasonal, and remainder parts, and flags points whose
remainder falls outside a quartile fence. Cleaning replaces flagged values by
linear interpolation between their nearest unflagged neighbors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Dataset, is_missing
from .errors import AllMissing, BadSpan, TooManyOutliers, TooShort

DEFAULT_SPAN = 0.25

IMPUTE_METHODS = ("linear_interpolation", "locf", "nocb", "moving_average", "mean", "median")


@dataclass(frozen=True)
class Decomposition:
    """Additive split of a series: trend + seasonal + remainder = original."""

    trend: np.ndarray
    seasonal: np.ndarray
    remainder: np.ndarray


@dataclass(frozen=True)
class AnomalyReport:
    """Flagged indices with the fence that produced them.

    ``replacements`` is filled by clean_series; plain detection leaves it None.
    """

    flagged: np.ndarray
    lower: float
    upper: float
    span: float
    replacements: np.ndarray | None = None


def _validate_series(seq, min_length: int) -> np.ndarray:
    x = np.asarray(seq, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a one-dimensional series, got shape {x.shape}")
    if len(x) < min_length:
        raise TooShort(f"need at least {min_length} values, got {len(x)}")
    if is_missing(x).any():
        raise ValueError("series contains missing values; impute first")
    return x


def loess_smooth(seq, span_fraction: float = DEFAULT_SPAN) -> np.ndarray:
    """Locally weighted degree-1 regression evaluated at every index.

    Each point is fit on its k = ceil(span * n) nearest neighbors (by index)
    with tricube weights. Windows are contiguous index ranges, shifted inward
    at the boundaries so every fit uses exactly k points.
    """
    x = _validate_series(seq, 4)
    if not 0 < span_fraction <= 1:
        raise BadSpan(f"span must be in (0, 1], got {span_fraction}")
    n = len(x)
    k = min(n, max(1, math.ceil(span_fraction * n)))

    centers = np.arange(n)
    starts = np.clip(centers - k // 2, 0, n - k)
    window = starts[:, None] + np.arange(k)[None, :]  # (n, k) indices
    t = (window - centers[:, None]).astype(float)  # regressor centered per row
    y = x[window]
    dist = np.abs(t)
    max_dist = dist.max(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(max_dist > 0, dist / max_dist, 0.0)
    w = np.clip(1.0 - u**3, 0.0, None) ** 3

    # closed-form weighted linear fit per row; the fit is evaluated at the
    # centered coordinate 0, so the prediction is just the intercept
    sw = w.sum(axis=1)
    swt = (w * t).sum(axis=1)
    swy = (w * y).sum(axis=1)
    swtt = (w * t * t).sum(axis=1)
    swty = (w * t * y).sum(axis=1)
    denom = sw * swtt - swt * swt
    # a window with less than two materially weighted points cannot support
    # a line; fall back to the weighted mean
    degenerate = denom <= 1e-12 * np.maximum(sw * swtt, 1.0)
    safe_denom = np.where(degenerate, 1.0, denom)
    slope = (sw * swty - swt * swy) / safe_denom
    intercept = (swy - slope * swt) / sw
    return np.where(degenerate, swy / sw, intercept)


def decompose(seq, period: int | None = None, span_fraction: float = DEFAULT_SPAN) -> Decomposition:
    """Split a series into loess trend, optional seasonal part, and remainder.

    Without a period the seasonal part is zero. With period p, the seasonal
    part is the per-phase mean of the detrended series, centered to sum to
    zero over one cycle.
    """
    x = _validate_series(seq, 4)
    trend = loess_smooth(x, span_fraction)
    if period is None:
        seasonal = np.zeros_like(x)
    else:
        if period < 1:
            raise BadSpan(f"period must be positive, got {period}")
        if len(x) < 2 * period:
            raise TooShort(f"need at least {2 * period} values for period {period}")
        detrended = x - trend
        phase_means = np.array(
            [detrended[phase::period].mean() for phase in range(period)]
        )
        phase_means -= phase_means.mean()
        seasonal = np.resize(phase_means, len(x))
    remainder = x - trend - seasonal
    return Decomposition(trend=trend, seasonal=seasonal, remainder=remainder)


def detect_outliers(seq, span_fraction: float = DEFAULT_SPAN, period: int | None = None) -> AnomalyReport:
    """Flag points whose remainder leaves the quartile fence.

    A point is flagged when its remainder is below Q1 - 3*IQR or above
    Q3 + 3*IQR. When the remainder's IQR collapses to zero but the remainder
    is not constant, the fence falls back to three standard deviations
    around zero.
    """
    x = _validate_series(seq, 4)
    r = decompose(x, period=period, span_fraction=span_fraction).remainder
    q1, q3 = np.quantile(r, [0.25, 0.75])
    iqr = q3 - q1
    if iqr > 0:
        lower, upper = q1 - 3.0 * iqr, q3 + 3.0 * iqr
    elif np.all(r == r[0]):
        lower, upper = -np.inf, np.inf
    else:
        sd = float(r.std())
        lower, upper = -3.0 * sd, 3.0 * sd
    flagged = np.flatnonzero((r < lower) | (r > upper))
    return AnomalyReport(flagged=flagged, lower=float(lower), upper=float(upper), span=span_fraction)


def repair(seq, flagged) -> np.ndarray:
    """Replace the flagged values by interpolating between unflagged neighbors.

    Flags at the boundaries take the nearest unflagged value. Unflagged
    points are never changed.
    """
    x = np.asarray(seq, dtype=float).copy()
    flagged = np.asarray(flagged, dtype=int)
    if len(flagged) == 0:
        return x
    keep = np.ones(len(x), dtype=bool)
    keep[flagged] = False
    if not keep.any():
        raise TooManyOutliers("every point was flagged; nothing to interpolate from")
    clean_idx = np.flatnonzero(keep)
    x[flagged] = np.interp(flagged, clean_idx, x[clean_idx])
    return x


def clean_series(seq, span_fraction: float = DEFAULT_SPAN, period: int | None = None):
    """Detect outliers and repair them by interpolating between clean neighbors.

    Returns the repaired series and the report including replacements.
    """
    x = _validate_series(seq, 4)
    report = detect_outliers(x, span_fraction=span_fraction, period=period)
    out = repair(x, report.flagged)
    report = AnomalyReport(
        flagged=report.flagged,
        lower=report.lower,
        upper=report.upper,
        span=report.span,
        replacements=out[report.flagged],
    )
    return out, report


def impute(seq, method: str, window: int | None = None) -> np.ndarray:
    """Fill missing values. Observed values are never touched.

    Methods: linear_interpolation, locf, nocb, moving_average (centered, with
    half-width ``window``), mean, median. Carry-forward falls back to
    carry-backward at the head and vice versa at the tail. All fills are
    computed from the originally observed values only, so imputing twice
    changes nothing.
    """
    x = np.asarray(seq, dtype=float).copy()
    if x.ndim != 1:
        raise ValueError(f"expected a one-dimensional series, got shape {x.shape}")
    if method not in IMPUTE_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {IMPUTE_METHODS}")
    missing = is_missing(x)
    if not missing.any():
        return x
    if missing.all():
        raise AllMissing("no observed values to impute from")
    obs_idx = np.flatnonzero(~missing)
    obs_val = x[obs_idx]
    gaps = np.flatnonzero(missing)

    if method == "linear_interpolation":
        x[gaps] = np.interp(gaps, obs_idx, obs_val)
    elif method == "locf":
        pos = np.searchsorted(obs_idx, gaps, side="right") - 1
        pos = np.clip(pos, 0, len(obs_idx) - 1)  # head falls back to first observed
        x[gaps] = obs_val[pos]
    elif method == "nocb":
        pos = np.searchsorted(obs_idx, gaps, side="left")
        pos = np.clip(pos, 0, len(obs_idx) - 1)  # tail falls back to last observed
        x[gaps] = obs_val[pos]
    elif method == "moving_average":
        if window is None or window < 1:
            raise BadSpan("moving_average needs a positive window")
        overall = obs_val.mean()
        for i in gaps:
            lo, hi = max(0, i - window), min(len(x), i + window + 1)
            nearby = obs_idx[(obs_idx >= lo) & (obs_idx < hi)]
            x[i] = x[nearby].mean() if len(nearby) else overall
    elif method == "mean":
        x[gaps] = obs_val.mean()
    else:  # median
        x[gaps] = np.median(obs_val)
    return x


def clean_dataset(dataset, columns: Sequence[str] | None = None, span_fraction: float = DEFAULT_SPAN):
    """Clean selected columns (default: all) of every record.

    Returns the cleaned dataset and a report map (record id, column) -> AnomalyReport.
    """
    names = tuple(columns) if columns is not None else dataset.schema.columns
    for name in names:
        if name not in dataset.schema.columns:
            raise ValueError(f"unknown column {name!r}")
    reports = {}
    new_records = []
    for rec in dataset.records:
        fixed = {}
        for name in names:
            repaired, report = clean_series(rec.measurements[name], span_fraction)
            fixed[name] = repaired
            reports[(rec.id, name)] = report
        new_records.append(rec.with_measurements(fixed))
    return Dataset(tuple(new_records), dataset.schema, dataset.seed), reports
