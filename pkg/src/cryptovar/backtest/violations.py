"""Violation series construction and hourly group splitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cryptovar.errors import DomainError
from cryptovar.marketdata.bars import DAY_MS, MINUTE_MS, minute_of
from cryptovar.marketdata.instruments import FUTURE, INDEX
from cryptovar.varengine.portfolio import Position

HOUR_MS = 3_600_000


@dataclass(frozen=True)
class ViolationSeries:
    """Parallel arrays of VaR estimates, realized outcomes and indicators.

    A violation is a realized loss at least as large as the estimated VaR,
    in return terms: realized_return <= q_return (both are loss-side
    negative numbers for long books).
    """

    timestamps: np.ndarray
    indicators: np.ndarray
    var_estimates: np.ndarray  # q_return per sample
    realized: np.ndarray       # realized portfolio return per sample
    confidence: float

    def __post_init__(self):
        n = len(self.timestamps)
        if not (len(self.indicators) == len(self.var_estimates) == len(self.realized) == n):
            raise DomainError("violation series arrays must be parallel")

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def violations(self) -> int:
        return int(self.indicators.sum())


def build_violations(
    timestamps, q_returns, realized_returns, confidence: float
) -> ViolationSeries:
    timestamps = np.asarray(timestamps, dtype=np.int64)
    q = np.asarray(q_returns, dtype=float)
    realized = np.asarray(realized_returns, dtype=float)
    indicators = (realized <= q).astype(int)
    return ViolationSeries(
        timestamps=timestamps,
        indicators=indicators,
        var_estimates=q,
        realized=realized,
        confidence=confidence,
    )


def split_groups(series: ViolationSeries, groups: int = 6) -> list[ViolationSeries]:
    """Partition hourly samples into ``groups`` strides by hour mod groups.

    Group i holds hours i, i+groups, i+2*groups, ... of each day, thinning
    the overlap between consecutive 1-day-horizon samples.
    """
    if groups <= 0:
        raise DomainError("groups must be positive")
    hours = (series.timestamps % DAY_MS) // HOUR_MS
    out = []
    for g in range(groups):
        mask = (hours % groups) == g
        out.append(
            ViolationSeries(
                timestamps=series.timestamps[mask],
                indicators=series.indicators[mask],
                var_estimates=series.var_estimates[mask],
                realized=series.realized[mask],
                confidence=series.confidence,
            )
        )
    return out


def mark_value_at(engine, position: Position, t_ms: int) -> float | None:
    """USD value of one position using minute-TWAP marks at time t.

    Returns None when a required bar is missing (the sample gets dropped).
    """
    minute = minute_of(t_ms)
    inst = position.instrument

    def bar(sym):
        minutes, twaps = engine.query_twap(sym, minute, minute + MINUTE_MS)
        return float(twaps[0]) if len(twaps) else None

    if inst.kind == INDEX:
        price = bar(inst.underlying)
        return None if price is None else position.quantity * price
    mark = bar(inst.id)
    if mark is None:
        return None
    if inst.kind == FUTURE:
        return position.quantity * mark
    index_price = bar(inst.underlying)
    if index_price is None:
        return None
    return position.quantity * mark * index_price


def realized_return(engine, positions: list[Position], t0_ms: int, horizon_days: float) -> float | None:
    """Portfolio return over [t0, t0 + horizon] from stored TWAP history.

    None (sample dropped) when marks are missing at either endpoint or the
    starting value is zero.
    """
    t1_ms = t0_ms + int(horizon_days * DAY_MS)
    v0 = 0.0
    v1 = 0.0
    for position in positions:
        a = mark_value_at(engine, position, t0_ms)
        b = mark_value_at(engine, position, t1_ms)
        if a is None or b is None:
            return None
        v0 += a
        v1 += b
    if v0 == 0.0:
        return None
    return (v1 - v0) / v0
