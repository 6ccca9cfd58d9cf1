"""Elastic and rigid distances between point sequences.

The warping distance aligns two sequences with a monotone path of match,
insert, and delete steps, summing the pointwise cost along the way. Cost is
the L1 distance between points by default, summed over dimensions, so one
shared path warps all measurement dimensions together. The banded variant
restricts the path to a diagonal corridor for speed; its corridor widens
automatically where sequence lengths differ so the end stays reachable.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _native
from .errors import DimensionMismatch, EmptyInput, LengthMismatch, OutOfRange


def euclidean(a, b) -> float:
    """Plain L2 distance between equal-length vectors."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths {a.size} and {b.size} differ")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _as_points(seq, name: str) -> np.ndarray:
    arr = np.asarray(seq, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise EmptyInput(f"{name} is empty")
    return np.ascontiguousarray(arr)


def _check_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    pa, pb = _as_points(a, "a"), _as_points(b, "b")
    if pa.shape[1] != pb.shape[1]:
        raise DimensionMismatch(
            f"point dimensions differ: {pa.shape[1]} vs {pb.shape[1]}"
        )
    return pa, pb


def dtw(a, b, squared: bool = False) -> float:
    """Minimum cumulative cost over monotone alignments of a and b.

    Sequences may have different lengths; points may be multivariate. With
    ``squared`` the pointwise cost is the squared L2 distance instead of L1.
    """
    pa, pb = _check_pair(a, b)
    return float(_native.dtw_full(pa, pb, squared))


def band_bounds(m: int, n: int, band_radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-row column bounds of the diagonal corridor.

    Row i is centered at i*(n-1)/(m-1). The half-width is the requested
    radius, widened to half the center step when lengths differ a lot, which
    keeps consecutive rows overlapping and the corner reachable at radius 0.
    """
    if band_radius < 0:
        raise OutOfRange(f"band radius must be nonnegative, got {band_radius}")
    if m == 1 or n == 1:
        lo = np.zeros(m, dtype=np.int64)
        hi = np.full(m, n - 1, dtype=np.int64)
        return lo, hi
    step = (n - 1) / (m - 1)
    # Half-width of at least step/2 keeps consecutive rows reachable by a
    # monotone step, and at least 1/2 keeps off-integer rows from rounding
    # empty; at equal lengths radius 0 stays exactly the diagonal.
    width = max(float(band_radius), step / 2.0, 0.5)
    centers = np.arange(m) * step
    lo = np.maximum(0, np.ceil(centers - width)).astype(np.int64)
    hi = np.minimum(n - 1, np.floor(centers + width)).astype(np.int64)
    return lo, hi


def dtw_banded(a, b, band_radius: int, squared: bool = False) -> float:
    """Warping distance restricted to a diagonal corridor.

    Always at least the unconstrained distance, and equal to it once the
    radius reaches max(len(a), len(b)).
    """
    pa, pb = _check_pair(a, b)
    lo, hi = band_bounds(pa.shape[0], pb.shape[0], band_radius)
    return float(_native.dtw_banded(pa, pb, lo, hi, squared))


def dtw_with_path(a, b, squared: bool = False):
    """Full-matrix warping distance with the optimal alignment path.

    Slower than dtw(); intended for inspection and testing.
    """
    pa, pb = _check_pair(a, b)
    m, n = pa.shape[0], pb.shape[0]
    diff = pa[:, None, :] - pb[None, :, :]
    cost = (diff * diff).sum(-1) if squared else np.abs(diff).sum(-1)
    dp = np.full((m + 1, n + 1), np.inf)
    dp[0, 0] = 0.0
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            dp[i, j] = cost[i - 1, j - 1] + min(
                dp[i - 1, j], dp[i, j - 1], dp[i - 1, j - 1]
            )
    path = []
    i, j = m, n
    while (i, j) != (1, 1):
        path.append((i - 1, j - 1))
        moves = [(i - 1, j - 1), (i - 1, j), (i, j - 1)]
        i, j = min(moves, key=lambda ij: dp[ij])
    path.append((0, 0))
    path.reverse()
    return float(dp[m, n]), path


METRICS = ("dtw", "dtw_banded", "euclidean")


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with the metric that produced them."""

    values: np.ndarray
    metric: str
    seconds: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"distance matrix must be square, got {v.shape}")
        if not np.allclose(v, v.T, atol=1e-12, rtol=0.0):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(v) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if np.any(v < 0.0):
            raise ValueError("distances must be nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _pair_distance(args):
    i, j, a, b, metric, band_radius, squared = args
    if metric == "dtw":
        return i, j, dtw(a, b, squared)
    if metric == "dtw_banded":
        return i, j, dtw_banded(a, b, band_radius, squared)
    return i, j, euclidean(a, b)


def distance_matrix(
    sequences,
    metric: str = "dtw",
    band_radius: int | None = None,
    squared: bool = False,
    jobs: int = 1,
) -> DistanceMatrix:
    """Pairwise distances between sequences.

    Only the upper triangle is computed and then mirrored. Pairs are
    independent, so ``jobs`` > 1 splits them across processes with identical
    results. Wall-clock time is recorded on the result.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    if metric == "dtw_banded" and (band_radius is None or band_radius < 0):
        raise OutOfRange("dtw_banded needs a nonnegative band radius")
    seqs = [_as_points(s, f"sequence {i}") for i, s in enumerate(sequences)]
    n = len(seqs)
    if n == 0:
        raise EmptyInput("no sequences given")
    start = time.perf_counter()
    out = np.zeros((n, n))
    tasks = [
        (i, j, seqs[i], seqs[j], metric, band_radius, squared)
        for i in range(n)
        for j in range(i + 1, n)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_pair_distance, tasks, chunksize=64)
            for i, j, val in results:
                out[i, j] = out[j, i] = val
    else:
        for task in tasks:
            i, j, val = _pair_distance(task)
            out[i, j] = out[j, i] = val
    elapsed = time.perf_counter() - start
    label = metric if metric != "dtw_banded" else f"dtw_banded(r={band_radius})"
    if squared:
        label += "+squared"
    return DistanceMatrix(values=out, metric=label, seconds=elapsed)
