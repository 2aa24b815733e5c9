"""Zero-latency tickerplant: log to disk, then fan out to subscribers.

Every publish appends to the recovery log before any subscriber sees the
batch; replaying the log through fresh subscribers reproduces table state
exactly. A torn trailing record (crash during append) is skipped with a
warning on replay.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence

from cryptovar.errors import ContractViolation, ParseError
from cryptovar.marketdata.bars import Tick
from cryptovar.tickengine.records import FeedRecord, decode_record, encode_record

logger = logging.getLogger(__name__)


class Subscriber(Protocol):
    def on_records(self, records: Sequence[FeedRecord]) -> None: ...


class Tickerplant:
    """Publisher that logs and distributes feed records in arrival order."""

    def __init__(self, log_path: Path | str | None = None):
        self.log_path = Path(log_path) if log_path else None
        self._log_fh = open(self.log_path, "ab") if self.log_path else None
        self._subscribers: list[Subscriber] = []
        self._next_seq = 0
        self.published = 0

    def subscribe(self, subscriber: Subscriber | Callable[[Sequence[FeedRecord]], None]) -> None:
        if callable(subscriber) and not hasattr(subscriber, "on_records"):
            subscriber = _CallbackSubscriber(subscriber)
        self._subscribers.append(subscriber)

    def ingest(self, ticks: Iterable[Tick]) -> int:
        """Assign sequence numbers and publish; returns the last seq."""
        records = []
        for tick in ticks:
            records.append(FeedRecord(seq=self._next_seq, tick=tick))
            self._next_seq += 1
        return self.publish(records)

    def publish(self, records: Sequence[FeedRecord]) -> int:
        """Log then deliver a batch; subscribers never see unlogged data."""
        if not records:
            return self._next_seq - 1
        for prev, cur in zip(records, records[1:]):
            if cur.seq <= prev.seq:
                raise ContractViolation("sequence numbers must strictly increase")
        if self._log_fh is not None:
            payload = b"".join(encode_record(r) for r in records)
            self._log_fh.write(payload)
            self._log_fh.flush()
        for subscriber in self._subscribers:
            subscriber.on_records(records)
        self.published += len(records)
        self._next_seq = max(self._next_seq, records[-1].seq + 1)
        return records[-1].seq

    def close(self) -> None:
        if self._log_fh is not None:
            self._log_fh.close()
            self._log_fh = None


class _CallbackSubscriber:
    def __init__(self, fn):
        self.fn = fn

    def on_records(self, records):
        self.fn(records)


def replay_log(
    path: Path | str,
    subscribers: Sequence[Subscriber],
    batch_size: int = 1024,
) -> int:
    """Replay a recovery log through subscribers; returns records replayed.

    Anything before the last complete record replays; a torn trailing line
    is skipped with a warning.
    """
    path = Path(path)
    replayed = 0
    batch: list[FeedRecord] = []

    def flush():
        nonlocal replayed
        if batch:
            for sub in subscribers:
                sub.on_records(batch)
            replayed += len(batch)
            batch.clear()

    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.split(b"\n")
    torn_tail = lines.pop() if lines and lines[-1] != b"" else None
    if torn_tail:
        logger.warning("%s: torn trailing record skipped (%d bytes)", path, len(torn_tail))
    for line_no, line in enumerate(lines, start=1):
        if not line:
            continue
        try:
            batch.append(decode_record(line))
        except (json.JSONDecodeError, ParseError) as exc:
            if line_no == len(lines):
                logger.warning("%s:%d: torn record skipped: %s", path, line_no, exc)
                continue
            raise ParseError(f"{path}:{line_no}: corrupt log record: {exc}") from exc
        if len(batch) >= batch_size:
            flush()
    flush()
    return replayed
