"""Ticks, per-minute TWAP bars and log-return series.

Timestamps are UTC epoch milliseconds throughout; the market trades 24/7 so
a "day" is the window [00:00, 24:00) UTC and a minute bucket is the
timestamp floored to the minute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from cryptovar.errors import ContractViolation, DomainError

MINUTE_MS = 60_000
DAY_MS = 86_400_000


def minute_of(time_ms: int) -> int:
    """Floor an epoch-ms timestamp to its minute bucket."""
    return (time_ms // MINUTE_MS) * MINUTE_MS


@dataclass(frozen=True)
class Tick:
    """One timestamped market-data record for an instrument or index."""

    instrument: str
    time: int  # epoch ms, UTC
    mark_price: float | None = None
    index_price: float | None = None
    bid: float | None = None
    ask: float | None = None
    last: float | None = None
    open_interest: float | None = None
    delta: float | None = None
    gamma: float | None = None
    theta: float | None = None
    implied_vol: float | None = None


@dataclass(frozen=True)
class TwapBar:
    """Per-minute pre-averaged price for one symbol."""

    sym: str
    minute: int  # epoch ms, multiple of MINUTE_MS
    twap: float
    count: int


def aggregate_twap(
    ticks: Sequence[float] | Sequence[Tick],
    sym: str,
    minute: int,
    existing: TwapBar | None = None,
    prices: Sequence[float] | None = None,
) -> TwapBar:
    """Fold a batch of same-minute tick prices into a running TWAP bar.

    The running mean is carried as (sum, count) so any batching or ordering
    of the same ticks produces the same bar. ``ticks`` may be Tick objects
    (validated against ``sym``/``minute``) or raw prices.
    """
    if prices is None:
        prices = []
        for t in ticks:
            if isinstance(t, Tick):
                if t.instrument != sym:
                    raise ContractViolation(
                        f"mixed symbols in batch: {t.instrument} != {sym}"
                    )
                if minute_of(t.time) != minute:
                    raise ContractViolation(
                        f"tick at {t.time} outside minute bucket {minute}"
                    )
                price = t.mark_price if t.mark_price is not None else t.index_price
                if price is None:
                    raise ContractViolation(f"tick for {sym} carries no price")
                prices.append(price)
            else:
                prices.append(float(t))

    total = math.fsum(prices)
    count = len(prices)
    if existing is not None:
        if existing.sym != sym or existing.minute != minute:
            raise ContractViolation("existing bar keyed to a different (sym, minute)")
        total += existing.twap * existing.count
        count += existing.count
    if count == 0:
        raise ContractViolation("cannot build a bar from zero ticks")
    return TwapBar(sym=sym, minute=minute, twap=total / count, count=count)


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns of TWAP prices on a fixed wall-clock grid.

    Each value at ``timestamps[i]`` is ln(P_t / P_{t-interval}); timestamps
    are strictly increasing multiples of the interval. A step larger than
    one interval marks a gap where bars were missing (gaps are dropped,
    never filled).
    """

    sym: str
    interval_minutes: int
    timestamps: np.ndarray  # int64 epoch ms, end time of each return period
    values: np.ndarray  # float64

    def __len__(self) -> int:
        return len(self.values)


def log_returns(
    bars: Iterable[TwapBar] | tuple[np.ndarray, np.ndarray],
    interval_minutes: int,
    sym: str | None = None,
) -> ReturnSeries:
    """Build an interval-spaced log-return series from minute TWAP bars.

    Bars are snapped to the UTC wall-clock grid of the interval (minute
    stamps divisible by the interval); a return is emitted only when both
    ends of the interval have a bar. Raises :class:`DomainError` on
    non-positive prices.
    """
    if interval_minutes <= 0:
        raise ContractViolation("interval must be a positive number of minutes")
    if isinstance(bars, tuple):
        minutes, prices = bars
        minutes = np.asarray(minutes, dtype=np.int64)
        prices = np.asarray(prices, dtype=np.float64)
        name = sym or ""
    else:
        bar_list = list(bars)
        minutes = np.array([b.minute for b in bar_list], dtype=np.int64)
        prices = np.array([b.twap for b in bar_list], dtype=np.float64)
        name = sym or (bar_list[0].sym if bar_list else "")

    if len(minutes) == 0:
        return ReturnSeries(
            name, interval_minutes, np.empty(0, dtype=np.int64), np.empty(0)
        )
    order = np.argsort(minutes)
    minutes, prices = minutes[order], prices[order]

    interval_ms = interval_minutes * MINUTE_MS
    on_grid = (minutes % interval_ms) == 0
    minutes, prices = minutes[on_grid], prices[on_grid]

    bad = prices <= 0
    if bad.any():
        raise DomainError(
            f"non-positive price for {name} at t={int(minutes[bad.argmax()])}"
        )

    if len(minutes) < 2:
        return ReturnSeries(
            name, interval_minutes, np.empty(0, dtype=np.int64), np.empty(0)
        )
    step = np.diff(minutes)
    ok = step == interval_ms
    values = np.log(prices[1:][ok] / prices[:-1][ok])
    stamps = minutes[1:][ok]
    return ReturnSeries(name, interval_minutes, stamps, values)


def resample_twap(
    minutes: np.ndarray, prices: np.ndarray, interval_minutes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Aggregate minute TWAPs into interval TWAPs (equal weight per minute).

    Buckets are labeled by their start stamp; buckets with no bars are
    absent from the output.
    """
    minutes = np.asarray(minutes, dtype=np.int64)
    prices = np.asarray(prices, dtype=np.float64)
    if len(minutes) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0)
    interval_ms = interval_minutes * MINUTE_MS
    buckets = (minutes // interval_ms) * interval_ms
    starts, inverse, counts = np.unique(buckets, return_inverse=True, return_counts=True)
    sums = np.zeros(len(starts))
    np.add.at(sums, inverse, prices)
    return starts, sums / counts


def align_series(r1: ReturnSeries, r2: ReturnSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Intersect two return series on identical timestamps.

    Returns (timestamps, values1, values2); non-overlapping points are
    dropped.
    """
    if r1.interval_minutes != r2.interval_minutes:
        raise ContractViolation("cannot align series with different intervals")
    common, idx1, idx2 = np.intersect1d(
        r1.timestamps, r2.timestamps, assume_unique=True, return_indices=True
    )
    return common, r1.values[idx1], r2.values[idx2]
