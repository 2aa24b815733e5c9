"""In-memory portfolio bookkeeping.

Holdings live with the process (no persistence); duplicate adds merge
quantities and a merge to zero removes the row.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from cryptovar.errors import UnknownPortfolioError, ValidationError
from cryptovar.marketdata.instruments import Instrument, parse_instrument


@dataclass(frozen=True)
class Position:
    pid: str
    instrument: Instrument
    quantity: float


class PortfolioBook:
    """Thread-safe position table keyed by (pid, instrument id)."""

    def __init__(self):
        self._lock = threading.RLock()
        self._positions: dict[str, dict[str, Position]] = {}

    def add(self, pid: str, instrument_id: str, quantity: float) -> Position | None:
        """Add (or merge) a position; returns None when merged away."""
        if quantity == 0:
            raise ValidationError("quantity must be non-zero")
        instrument = parse_instrument(instrument_id)
        with self._lock:
            book = self._positions.setdefault(pid, {})
            current = book.get(instrument.id)
            new_qty = quantity + (current.quantity if current else 0.0)
            if new_qty == 0:
                book.pop(instrument.id, None)
                return None
            position = Position(pid=pid, instrument=instrument, quantity=new_qty)
            book[instrument.id] = position
            return position

    def remove(self, pid: str, instrument_id: str) -> None:
        with self._lock:
            book = self._positions.get(pid)
            if not book or instrument_id not in book:
                raise UnknownPortfolioError(f"no position {instrument_id} in {pid}")
            del book[instrument_id]

    def positions(self, pid: str) -> list[Position]:
        with self._lock:
            return sorted(
                self._positions.get(pid, {}).values(), key=lambda p: p.instrument.id
            )

    def pids(self) -> list[str]:
        with self._lock:
            return sorted(pid for pid, book in self._positions.items() if book)

    def known(self, pid: str) -> bool:
        """True once a pid has ever held a position (even if now empty)."""
        with self._lock:
            return pid in self._positions


def extract_indices(positions: list[Position]) -> tuple[str, ...]:
    """Distinct underlying index symbols across the positions, sorted."""
    return tuple(sorted({p.instrument.underlying for p in positions}))
