"""Pure-numpy versions of the compiled kernels.

Used when the extension module is unavailable or disabled. Each function
performs the same floating-point operations in the same order as its compiled
counterpart, so both backends return bit-identical results. The dynamic
programs sweep anti-diagonals because cells on one anti-diagonal are mutually
independent and can be updated as vectors.
"""

from __future__ import annotations

import numpy as np

_INF = np.inf


def _cost_matrix(a: np.ndarray, b: np.ndarray, squared: bool) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    if squared:
        return (diff * diff).sum(axis=-1)
    return np.abs(diff).sum(axis=-1)


def _dtw_dp(cost: np.ndarray) -> float:
    m, n = cost.shape
    dp = np.full((m, n), _INF)
    dp[0, :] = np.cumsum(cost[0, :])
    for s in range(1, m + n - 1):
        i_lo = max(1, s - n + 1)
        i_hi = min(m - 1, s)
        if i_hi < i_lo:
            continue  # the diagonal lies entirely in row 0, already filled
        ii = np.arange(i_lo, i_hi + 1)
        jj = s - ii
        up = dp[ii - 1, jj]
        diag = np.where(jj >= 1, dp[ii - 1, np.maximum(jj - 1, 0)], _INF)
        left = np.where(jj >= 1, dp[ii, np.maximum(jj - 1, 0)], _INF)
        dp[ii, jj] = cost[ii, jj] + np.minimum(np.minimum(up, diag), left)
    return float(dp[m - 1, n - 1])


def dtw_full(a: np.ndarray, b: np.ndarray, squared: bool = False) -> float:
    """Unconstrained warping distance between point sequences a (m,d) and b (n,d)."""
    return _dtw_dp(_cost_matrix(a, b, squared))


def dtw_banded(
    a: np.ndarray,
    b: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    squared: bool = False,
) -> float:
    """Warping distance restricted to per-row column bands [lo[i], hi[i]]."""
    cost = _cost_matrix(a, b, squared)
    n = cost.shape[1]
    cols = np.arange(n)
    outside = (cols[None, :] < lo[:, None]) | (cols[None, :] > hi[:, None])
    cost[outside] = _INF
    return _dtw_dp(cost)


def holt_sse_grid(x: np.ndarray, alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """One-step-ahead squared-error totals of Holt's linear smoothing.

    Returns a (len(alphas), len(betas)) matrix of SSE values. Level starts at
    x[0], trend at x[1] - x[0], and predictions are scored from t = 1 onward.
    """
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two values")
    na, nb = alphas.shape[0], betas.shape[0]
    av = np.repeat(alphas, nb)
    bv = np.tile(betas, na)
    lvl = np.full(na * nb, x[0])
    trd = np.full(na * nb, x[1] - x[0])
    sse = np.zeros(na * nb)
    for t in range(1, n):
        xt = x[t]
        pred = lvl + trd
        e = xt - pred
        sse += e * e
        lnew = av * xt + (1.0 - av) * pred
        trd = bv * (lnew - lvl) + (1.0 - bv) * trd
        lvl = lnew
    return sse.reshape(na, nb)
