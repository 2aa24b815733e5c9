"""Trailing-window TWAP cache for the inference procedure.

Caches the immutable part of the window (minutes that have rolled over);
the still-accumulating current minute is always fetched fresh, so cache
output equals a cold query over the same range.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from cryptovar.marketdata.bars import DAY_MS


@dataclass
class _Entry:
    lo: int
    hi: int
    minutes: np.ndarray
    twaps: np.ndarray


class InferenceCache:
    """Per-symbol cache of trailing minute-TWAP windows.

    ``fetch(sym, lo, hi)`` must return (minutes, twaps, query_count) for
    the half-open range [lo, hi).
    """

    def __init__(self, fetch):
        self._fetch = fetch
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.RLock()
        self.last_call_queries = 0
        self.total_queries = 0

    def evict(self, sym: str | None = None) -> None:
        with self._lock:
            if sym is None:
                self._entries.clear()
            else:
                self._entries.pop(sym, None)

    def window(
        self, sym: str, days: float, now_ms: int, immutable_before: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """Trailing window [now - days*1d, now), fetching only missing ranges."""
        hi = now_ms
        lo = now_ms - int(days * DAY_MS)
        queries = 0
        if lo >= hi:
            self.last_call_queries = 0
            return np.empty(0, dtype=np.int64), np.empty(0)

        cache_hi = min(hi, immutable_before)
        with self._lock:
            entry = self._entries.get(sym)
            if cache_hi > lo:
                if entry is None or entry.hi < lo or entry.lo > cache_hi:
                    minutes, twaps, n = self._fetch(sym, lo, cache_hi)
                    queries += n
                    entry = _Entry(lo, cache_hi, minutes, twaps)
                else:
                    parts_m = [entry.minutes]
                    parts_t = [entry.twaps]
                    if lo < entry.lo:
                        m, t, n = self._fetch(sym, lo, entry.lo)
                        queries += n
                        parts_m.insert(0, m)
                        parts_t.insert(0, t)
                    if cache_hi > entry.hi:
                        m, t, n = self._fetch(sym, entry.hi, cache_hi)
                        queries += n
                        parts_m.append(m)
                        parts_t.append(t)
                    minutes = np.concatenate(parts_m)
                    twaps = np.concatenate(parts_t)
                    entry = _Entry(min(lo, entry.lo), max(cache_hi, entry.hi), minutes, twaps)
                # trim the cache to the trailing window
                keep = entry.minutes >= lo
                entry = _Entry(lo, entry.hi, entry.minutes[keep], entry.twaps[keep])
                self._entries[sym] = entry
                # requests may step backward in time: slice to [lo, cache_hi)
                sel = entry.minutes < cache_hi
                out_minutes, out_twaps = entry.minutes[sel], entry.twaps[sel]
            else:
                out_minutes = np.empty(0, dtype=np.int64)
                out_twaps = np.empty(0)

        # live tail beyond the immutable horizon is never cached
        if hi > cache_hi:
            m, t, n = self._fetch(sym, max(cache_hi, lo), hi)
            queries += n
            out_minutes = np.concatenate([out_minutes, m])
            out_twaps = np.concatenate([out_twaps, t])

        self.last_call_queries = queries
        self.total_queries += queries
        return out_minutes, out_twaps
