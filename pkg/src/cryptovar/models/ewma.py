"""Exponentially weighted moving average variance/covariance forecasting.

Operates on 30-minute log returns; the one-period (30-min) estimate is
scaled linearly to the requested horizon (48 thirty-minute periods per
day, so a 2-day horizon multiplies the raw term by 96).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cryptovar.errors import InsufficientDataError
from cryptovar.marketdata.bars import ReturnSeries, align_series
from cryptovar.models.psd import CovarianceForecast, ensure_psd

PERIODS_PER_DAY = 48  # 30-minute periods

DEFAULT_LAMBDA = 0.94
DEFAULT_LOOKBACK_DAYS = 5
DEFAULT_BAR_MINUTES = 30


@dataclass(frozen=True)
class EwmaParams:
    decay: float = DEFAULT_LAMBDA
    lookback_days: int = DEFAULT_LOOKBACK_DAYS
    bar_minutes: int = DEFAULT_BAR_MINUTES

    def __post_init__(self):
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay factor must lie in (0, 1)")


def _seed(v1: np.ndarray, v2: np.ndarray) -> float:
    if v1 is v2 or np.array_equal(v1, v2):
        return float(np.var(v1, ddof=1))
    return float(np.cov(v1, v2, ddof=1)[0, 1])


def ewma_forecast(
    r1: ReturnSeries | np.ndarray,
    r2: ReturnSeries | np.ndarray,
    decay: float,
    horizon_days: float,
) -> float:
    """One covariance-matrix term from the EWMA recursion.

    The recursion ``sigma = decay * sigma + (1 - decay) * r1_k * r2_k`` is
    seeded with the sample variance (same series) or sample covariance
    (distinct series) over the lookback, then scaled by 48 * horizon_days.
    """
    if isinstance(r1, ReturnSeries) and isinstance(r2, ReturnSeries):
        if r1 is r2 or r1.sym == r2.sym:
            v1 = v2 = np.asarray(r1.values, dtype=float)
        else:
            _, v1, v2 = align_series(r1, r2)
    else:
        v1 = np.asarray(r1, dtype=float)
        v2 = np.asarray(r2, dtype=float)
        if len(v1) != len(v2):
            raise InsufficientDataError("return series must be aligned")
    if len(v1) < 2:
        raise InsufficientDataError("need at least 2 aligned returns for EWMA")

    sigma = _seed(v1, v2)
    for cross in v1 * v2:
        sigma = decay * sigma + (1.0 - decay) * cross
    return float(PERIODS_PER_DAY * horizon_days * sigma)


def ewma_covariance_matrix(
    returns: dict[str, ReturnSeries],
    decay: float,
    horizon_days: float,
) -> CovarianceForecast:
    """Apply the pairwise EWMA recursion to every index pair.

    Fills a symmetric n x n matrix with n(n+1)/2 recursions and routes the
    result through the PSD repair (pairwise estimates need not cohere).
    """
    syms = tuple(sorted(returns))
    n = len(syms)
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            term = ewma_forecast(returns[syms[i]], returns[syms[j]], decay, horizon_days)
            matrix[i, j] = matrix[j, i] = term
    repaired, adjusted = ensure_psd(matrix)
    return CovarianceForecast(
        syms=syms,
        matrix=repaired,
        horizon_days=horizon_days,
        model="EWMA",
        psd_adjusted=adjusted,
    )
