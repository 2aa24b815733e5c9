"""Real-time subscribers: TWAP tables, latest-value caches, streaming rows.

State updates fold one record at a time in publish order, so replaying a
log through fresh subscribers reproduces table state byte-for-value
regardless of batching.
"""

from __future__ import annotations

import bisect
import logging
import threading
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from cryptovar.errors import ParseError
from cryptovar.marketdata.bars import DAY_MS, MINUTE_MS, minute_of
from cryptovar.marketdata.instruments import FUTURE, INDEX, OPTION, parse_instrument
from cryptovar.tickengine.quotes import IndexQuote, MarketSnapshot, ProductQuote
from cryptovar.tickengine.records import FeedRecord

logger = logging.getLogger(__name__)

INDEX_TWAP = "indextwap"
FUTURE_TWAP = "futuretwap"
OPTION_TWAP = "optiontwap"
TABLES = (INDEX_TWAP, FUTURE_TWAP, OPTION_TWAP)

_KIND_TO_TABLE = {INDEX: INDEX_TWAP, FUTURE: FUTURE_TWAP, OPTION: OPTION_TWAP}


class TwapTable:
    """Keyed (sym, minute) -> running (price sum, tick count)."""

    def __init__(self, name: str):
        self.name = name
        self._rows: dict[str, dict[int, list]] = defaultdict(dict)
        self._lock = threading.RLock()

    def accumulate(self, sym: str, minute: int, price: float) -> None:
        with self._lock:
            row = self._rows[sym].get(minute)
            if row is None:
                self._rows[sym][minute] = [price, 1]
            else:
                row[0] += price
                row[1] += 1

    def bars(self, sym: str, lo: int | None = None, hi: int | None = None):
        """Sorted (minutes, twaps, counts) arrays for [lo, hi)."""
        with self._lock:
            rows = self._rows.get(sym)
            if not rows:
                empty = np.empty(0)
                return np.empty(0, dtype=np.int64), empty, np.empty(0, dtype=np.int64)
            minutes = np.fromiter(rows.keys(), dtype=np.int64, count=len(rows))
            sums = np.empty(len(rows))
            counts = np.empty(len(rows), dtype=np.int64)
            for i, value in enumerate(rows.values()):
                sums[i] = value[0]
                counts[i] = value[1]
        order = np.argsort(minutes, kind="stable")
        minutes, sums, counts = minutes[order], sums[order], counts[order]
        if lo is not None or hi is not None:
            lo_i = np.searchsorted(minutes, lo) if lo is not None else 0
            hi_i = np.searchsorted(minutes, hi) if hi is not None else len(minutes)
            minutes, sums, counts = minutes[lo_i:hi_i], sums[lo_i:hi_i], counts[lo_i:hi_i]
        return minutes, sums / counts, counts

    def syms(self) -> list[str]:
        with self._lock:
            return sorted(self._rows)

    def day_columns(self, day_start_ms: int) -> dict[str, np.ndarray | list]:
        """Column arrays (sym, minute, twap, count) for one UTC day."""
        sym_col: list[str] = []
        minute_col: list[int] = []
        twap_col: list[float] = []
        count_col: list[int] = []
        with self._lock:
            for sym in sorted(self._rows):
                rows = self._rows[sym]
                for minute in sorted(rows):
                    if day_start_ms <= minute < day_start_ms + DAY_MS:
                        total, count = rows[minute]
                        sym_col.append(sym)
                        minute_col.append(minute)
                        twap_col.append(total / count)
                        count_col.append(count)
        return {
            "sym": sym_col,
            "minute": np.array(minute_col, dtype=np.int64),
            "twap": np.array(twap_col, dtype=np.float64),
            "count": np.array(count_col, dtype=np.int64),
        }

    def release_day(self, day_start_ms: int) -> int:
        """Drop in-memory rows for one UTC day; returns rows released."""
        released = 0
        with self._lock:
            for sym in list(self._rows):
                rows = self._rows[sym]
                for minute in [m for m in rows if day_start_ms <= m < day_start_ms + DAY_MS]:
                    del rows[minute]
                    released += 1
                if not rows:
                    del self._rows[sym]
        return released

    def row_count(self) -> int:
        with self._lock:
            return sum(len(r) for r in self._rows.values())


class PriceSubscriber:
    """Aggregates every tick into the per-minute TWAP table for its kind."""

    def __init__(self):
        self.tables = {name: TwapTable(name) for name in TABLES}
        self.dropped = 0
        self._kind_cache: dict[str, str] = {}

    def _table_for(self, instrument: str) -> TwapTable | None:
        kind = self._kind_cache.get(instrument)
        if kind is None:
            try:
                kind = parse_instrument(instrument).kind
            except ParseError:
                kind = "?"
            self._kind_cache[instrument] = kind
        table = _KIND_TO_TABLE.get(kind)
        return self.tables[table] if table else None

    def on_records(self, records: Sequence[FeedRecord]) -> None:
        for record in records:
            tick = record.tick
            table = self._table_for(tick.instrument)
            price = tick.index_price if table is self.tables[INDEX_TWAP] else tick.mark_price
            if price is None:
                price = tick.mark_price if tick.mark_price is not None else tick.index_price
            if table is None or price is None or price <= 0:
                self.dropped += 1
                continue
            table.accumulate(tick.instrument, minute_of(tick.time), price)


class LatestCacheSubscriber:
    """Latest price/greeks per symbol; max-time wins on out-of-order ticks."""

    def __init__(self):
        self._index: dict[str, IndexQuote] = {}
        self._product: dict[str, ProductQuote] = {}
        self._kind_cache: dict[str, str] = {}
        self._lock = threading.RLock()

    def _kind(self, instrument: str) -> str:
        kind = self._kind_cache.get(instrument)
        if kind is None:
            try:
                kind = parse_instrument(instrument).kind
            except ParseError:
                kind = "?"
            self._kind_cache[instrument] = kind
        return kind

    def on_records(self, records: Sequence[FeedRecord]) -> None:
        with self._lock:
            for record in records:
                tick = record.tick
                if self._kind(tick.instrument) == INDEX:
                    price = tick.index_price if tick.index_price is not None else tick.mark_price
                    if price is None:
                        continue
                    current = self._index.get(tick.instrument)
                    if current is None or tick.time >= current.time:
                        self._index[tick.instrument] = IndexQuote(price=price, time=tick.time)
                elif tick.mark_price is not None:
                    current = self._product.get(tick.instrument)
                    if current is None or tick.time >= current.time:
                        self._product[tick.instrument] = ProductQuote(
                            mark_price=tick.mark_price,
                            time=tick.time,
                            delta=tick.delta,
                            gamma=tick.gamma,
                            theta=tick.theta,
                            implied_vol=tick.implied_vol,
                        )

    def snapshot(self) -> MarketSnapshot:
        with self._lock:
            return MarketSnapshot(index=dict(self._index), product=dict(self._product))

    def sizes(self) -> tuple[int, int]:
        with self._lock:
            return len(self._index), len(self._product)


@dataclass(frozen=True)
class OlhcBar:
    sym: str
    start: int
    open: float
    low: float
    high: float
    close: float
    count: int


class StreamingSubscriber:
    """Keeps raw tick rows for OLHC queries and serves vol-surface snapshots.

    Raw rows older than the purge horizon are dropped on a rolling basis.
    """

    def __init__(self, latest: LatestCacheSubscriber, purge_horizon_ms: int = DAY_MS):
        self.latest = latest
        self.purge_horizon_ms = purge_horizon_ms
        self._rows: dict[str, deque] = defaultdict(deque)  # (time, price)
        self._lock = threading.RLock()
        self._max_time = 0

    def on_records(self, records: Sequence[FeedRecord]) -> None:
        with self._lock:
            for record in records:
                tick = record.tick
                price = tick.mark_price if tick.mark_price is not None else tick.index_price
                if price is None:
                    continue
                self._rows[tick.instrument].append((tick.time, price))
                if tick.time > self._max_time:
                    self._max_time = tick.time
            self._purge()

    def _purge(self) -> None:
        horizon = self._max_time - self.purge_horizon_ms
        for rows in self._rows.values():
            while rows and rows[0][0] < horizon:
                rows.popleft()

    def olhc(self, sym: str, interval_minutes: int, lo: int | None = None, hi: int | None = None) -> list[OlhcBar]:
        """Open/low/high/close per interval bucket over stored raw rows."""
        with self._lock:
            rows = list(self._rows.get(sym, ()))
        if not rows:
            logger.warning("olhc query for unknown or empty product %s", sym)
            return []
        interval_ms = interval_minutes * MINUTE_MS
        out: list[OlhcBar] = []
        rows.sort(key=lambda r: r[0])
        times = [r[0] for r in rows]
        start = times[0] if lo is None else lo
        end = (times[-1] + 1) if hi is None else hi
        i = bisect.bisect_left(times, start)
        current_bucket = None
        o = l = h = c = 0.0
        n = 0
        while i < len(rows) and rows[i][0] < end:
            t, price = rows[i]
            bucket = (t // interval_ms) * interval_ms
            if bucket != current_bucket:
                if current_bucket is not None:
                    out.append(OlhcBar(sym, current_bucket, o, l, h, c, n))
                current_bucket, o, l, h, c, n = bucket, price, price, price, price, 0
            l = min(l, price)
            h = max(h, price)
            c = price
            n += 1
            i += 1
        if current_bucket is not None:
            out.append(OlhcBar(sym, current_bucket, o, l, h, c, n))
        return out

    def vol_surface(self, underlying: str) -> list[dict]:
        """(maturity, strike, implied vol) triples from the latest quotes."""
        surface = []
        snapshot = self.latest.snapshot()
        for sym, quote in snapshot.product.items():
            if quote.implied_vol is None:
                continue
            try:
                inst = parse_instrument(sym)
            except ParseError:
                continue
            if inst.kind != OPTION or inst.underlying != underlying:
                continue
            surface.append(
                {
                    "instrument": sym,
                    "maturity": inst.maturity.isoformat(),
                    "strike": inst.strike,
                    "implied_vol": quote.implied_vol,
                }
            )
        surface.sort(key=lambda row: (row["maturity"], row["strike"]))
        return surface
