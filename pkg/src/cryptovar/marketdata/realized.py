"""Realized measures from 5-minute return windows: RV, RQ, RCov, RCorr."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cryptovar.errors import (
    ContractViolation,
    DegenerateCorrelationError,
    InsufficientDataError,
)
from cryptovar.marketdata.bars import MINUTE_MS, ReturnSeries, align_series


@dataclass(frozen=True)
class RealizedWindow:
    """Realized measures for one symbol (or symbol pair) over a window."""

    sym: str
    window_minutes: int
    end_time: int
    rv: float
    rq: float
    rcov: float | None = None
    rcorr: float | None = None


def _window_values(returns: ReturnSeries, window_minutes: int) -> np.ndarray:
    interval = returns.interval_minutes
    if window_minutes % interval != 0:
        raise ContractViolation(
            f"window of {window_minutes} min not divisible by {interval}-min interval"
        )
    expected = window_minutes // interval
    values = returns.values
    if len(values) != expected:
        raise InsufficientDataError(
            f"window needs {expected} returns, got {len(values)}"
        )
    if expected > 1:
        step = np.diff(returns.timestamps)
        if not (step == interval * MINUTE_MS).all():
            raise InsufficientDataError("window has gaps (non-consecutive returns)")
    return values


def realized_variance(returns: ReturnSeries, window_minutes: int) -> float:
    """Sum of squared returns over a complete window."""
    values = _window_values(returns, window_minutes)
    return float(np.dot(values, values))


def realized_quarticity(returns: ReturnSeries, window_minutes: int) -> float:
    """Fourth-moment measure (n/3) * sum(r^4) with n returns per window."""
    values = _window_values(returns, window_minutes)
    n = len(values)
    return float((n / 3.0) * np.sum(values**4))


def realized_covariance(
    r1: ReturnSeries, r2: ReturnSeries, window_minutes: int
) -> float:
    """Sum of cross products over a complete aligned window."""
    _, v1, v2 = align_series(r1, r2)
    expected = window_minutes // r1.interval_minutes
    if len(v1) != expected:
        raise InsufficientDataError(
            f"aligned window needs {expected} returns, got {len(v1)}"
        )
    return float(np.dot(v1, v2))


def realized_correlation(
    r1: ReturnSeries, r2: ReturnSeries, window_minutes: int
) -> float:
    """RCov / sqrt(RV1 * RV2) on the aligned window; bounded in [-1, 1]."""
    _, v1, v2 = align_series(r1, r2)
    expected = window_minutes // r1.interval_minutes
    if len(v1) != expected:
        raise InsufficientDataError(
            f"aligned window needs {expected} returns, got {len(v1)}"
        )
    rv1 = float(np.dot(v1, v1))
    rv2 = float(np.dot(v2, v2))
    if rv1 <= 0.0 or rv2 <= 0.0:
        raise DegenerateCorrelationError("zero realized variance on one leg")
    return float(np.dot(v1, v2) / math.sqrt(rv1 * rv2))
