"""Tick-engine facade wiring tickerplant, subscribers, HDB and caches."""

from __future__ import annotations

import logging
from datetime import date
from pathlib import Path
from typing import Iterable

import numpy as np

from cryptovar.errors import ParseError
from cryptovar.marketdata.bars import DAY_MS, Tick, minute_of
from cryptovar.marketdata.instruments import parse_instrument
from cryptovar.tickengine.cache import InferenceCache
from cryptovar.tickengine.hdb import PartitionedStore, day_of_ms, day_start_ms
from cryptovar.tickengine.quotes import MarketSnapshot
from cryptovar.tickengine.subscribers import (
    INDEX_TWAP,
    TABLES,
    LatestCacheSubscriber,
    PriceSubscriber,
    StreamingSubscriber,
    TwapTable,
)
from cryptovar.tickengine.tickerplant import Tickerplant, replay_log

logger = logging.getLogger(__name__)

_KIND_TO_TABLE = {"index": "indextwap", "future": "futuretwap", "option": "optiontwap"}


class TickEngine:
    """In-process data service: ingestion, tables, persistence, queries."""

    def __init__(
        self,
        data_root: Path | str,
        log_path: Path | str | None = None,
        purge_horizon_ms: int = DAY_MS,
    ):
        self.store = PartitionedStore(data_root)
        self.price = PriceSubscriber()
        self.latest = LatestCacheSubscriber()
        self.streaming = StreamingSubscriber(self.latest, purge_horizon_ms)
        self.tickerplant = Tickerplant(log_path)
        self.tickerplant.subscribe(self.price)
        self.tickerplant.subscribe(self.latest)
        self.tickerplant.subscribe(self.streaming)
        self.inference_cache = InferenceCache(self._fetch_range)
        self._latest_time = 0
        self._table_cache: dict[str, str] = {}

    # -- ingestion ---------------------------------------------------------

    def ingest(self, ticks: Iterable[Tick]) -> int:
        ticks = list(ticks)
        for tick in ticks:
            if tick.time > self._latest_time:
                self._latest_time = tick.time
        return self.tickerplant.ingest(ticks)

    def latest_time(self) -> int:
        return self._latest_time

    def snapshot(self) -> MarketSnapshot:
        return self.latest.snapshot()

    # -- queries -----------------------------------------------------------

    def _table_name(self, sym: str) -> str:
        name = self._table_cache.get(sym)
        if name is None:
            try:
                name = _KIND_TO_TABLE[parse_instrument(sym).kind]
            except ParseError:
                name = INDEX_TWAP
            self._table_cache[sym] = name
        return name

    def _memory_table(self, sym: str) -> TwapTable:
        return self.price.tables[self._table_name(sym)]

    def _fetch_range(self, sym: str, lo: int, hi: int):
        """(minutes, twaps, query_count) merging disk partitions + memory."""
        table = self._table_name(sym)
        queries = 0
        disk_minutes = np.empty(0, dtype=np.int64)
        disk_twaps = np.empty(0)
        parts = []
        for day in self.store.dates():
            start = day_start_ms(day)
            if start + DAY_MS <= lo or start >= hi:
                continue
            data = self.store.read_columns(day, table, ("sym", "minute", "twap"))
            queries += 1
            if data is None or not len(data["minute"]):
                continue
            syms = np.asarray(data["sym"], dtype=object)
            minutes = np.asarray(data["minute"])
            mask = (syms == sym) & (minutes >= lo) & (minutes < hi)
            if mask.any():
                parts.append((minutes[mask], np.asarray(data["twap"])[mask]))
        if parts:
            disk_minutes = np.concatenate([p[0] for p in parts])
            disk_twaps = np.concatenate([p[1] for p in parts])

        mem_minutes, mem_twaps, _ = self._memory_table(sym).bars(sym, lo, hi)
        queries += 1

        if len(disk_minutes) and len(mem_minutes):
            # intraday rows win where a date was re-persisted but not released
            fresh = ~np.isin(disk_minutes, mem_minutes)
            disk_minutes, disk_twaps = disk_minutes[fresh], disk_twaps[fresh]
        minutes = np.concatenate([disk_minutes, mem_minutes])
        twaps = np.concatenate([disk_twaps, mem_twaps])
        order = np.argsort(minutes, kind="stable")
        return minutes[order], twaps[order], queries

    def query_twap(self, sym: str, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
        """Minute TWAP bars for [lo, hi), merging disk and intraday state."""
        if lo >= hi:
            return np.empty(0, dtype=np.int64), np.empty(0)
        minutes, twaps, _ = self._fetch_range(sym, lo, hi)
        return minutes, twaps

    def inference_window(self, sym: str, days: float, now_ms: int | None = None):
        """Trailing-window bars served through the inference cache."""
        now = now_ms if now_ms is not None else self._latest_time
        return self.inference_cache.window(
            sym, days, now, immutable_before=minute_of(self._latest_time)
        )

    # -- persistence -------------------------------------------------------

    def end_of_day_persist(self, day: date, release: bool = True) -> dict[str, int]:
        """Write one UTC day's rows for all tables, then drop them from memory."""
        start = day_start_ms(day)
        tables = {}
        for name in TABLES:
            tables[name] = self.price.tables[name].day_columns(start)
        self.store.write_partition(day, tables)
        released = {}
        if release:
            for name in TABLES:
                released[name] = self.price.tables[name].release_day(start)
        logger.info("persisted %s (%s rows released)", day, released)
        return released

    def pending_days(self) -> list[date]:
        """UTC days with in-memory rows, oldest first."""
        days = set()
        for name in TABLES:
            table = self.price.tables[name]
            for sym in table.syms():
                minutes, _, _ = table.bars(sym)
                if len(minutes):
                    days.update(day_of_ms(int(m)) for m in (minutes[0], minutes[-1]))
        return sorted(days)

    # -- recovery ----------------------------------------------------------

    def replay(self, log_path: Path | str) -> int:
        """Rebuild subscriber state from a recovery log."""
        count = replay_log(log_path, [self.price, self.latest, self.streaming])
        snapshot = self.latest.snapshot()
        times = [q.time for q in snapshot.index.values()]
        times += [q.time for q in snapshot.product.values()]
        if times:
            self._latest_time = max(self._latest_time, max(times))
        return count

    def close(self) -> None:
        self.tickerplant.close()
