"""Wire codec for feed files and the tickerplant recovery log.

Both use line-delimited JSON, one tick per line with ISO-8601 UTC
timestamps; log records additionally carry the ingestion sequence number,
so the replayer and the feedhandler share one codec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from cryptovar.errors import ParseError
from cryptovar.marketdata.bars import Tick

_TICK_FIELDS = (
    "mark_price",
    "index_price",
    "bid",
    "ask",
    "last",
    "open_interest",
    "delta",
    "gamma",
    "theta",
    "implied_vol",
)


@dataclass(frozen=True)
class FeedRecord:
    """A tick plus the monotone sequence number assigned at ingestion."""

    seq: int
    tick: Tick


def format_time(time_ms: int) -> str:
    dt = datetime.fromtimestamp(time_ms / 1000.0, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{time_ms % 1000:03d}Z"


def parse_time(text: str) -> int:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"bad timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000))


def tick_to_dict(tick: Tick) -> dict:
    out = {"instrument": tick.instrument, "time": format_time(tick.time)}
    for field in _TICK_FIELDS:
        value = getattr(tick, field)
        if value is not None:
            out[field] = value
    return out


def tick_from_dict(data: dict) -> Tick:
    try:
        instrument = data["instrument"]
        time_ms = parse_time(data["time"])
    except KeyError as exc:
        raise ParseError(f"tick record missing field {exc}") from exc
    fields = {k: float(data[k]) for k in _TICK_FIELDS if data.get(k) is not None}
    mark = fields.get("mark_price")
    if mark is not None and mark <= 0:
        raise ParseError(f"non-positive mark price for {instrument}")
    return Tick(instrument=instrument, time=time_ms, **fields)


def encode_record(record: FeedRecord) -> bytes:
    body = tick_to_dict(record.tick)
    body["seq"] = record.seq
    return (json.dumps(body, separators=(",", ":")) + "\n").encode()


def decode_record(line: bytes | str) -> FeedRecord:
    if isinstance(line, bytes):
        line = line.decode()
    data = json.loads(line)
    seq = data.pop("seq", None)
    if seq is None:
        raise ParseError("log record missing sequence number")
    return FeedRecord(seq=int(seq), tick=tick_from_dict(data))


def write_feed_file(path: Path | str, ticks: Iterable[Tick]) -> int:
    """Write a replayable feed file; returns the number of records."""
    count = 0
    with open(path, "w") as fh:
        for tick in ticks:
            fh.write(json.dumps(tick_to_dict(tick), separators=(",", ":")) + "\n")
            count += 1
    return count


def read_feed_file(path: Path | str) -> Iterator[Tick]:
    """Iterate ticks from a feed file (wire schema, no sequence numbers)."""
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield tick_from_dict(json.loads(line))
            except (json.JSONDecodeError, ParseError) as exc:
                raise ParseError(f"{path}:{line_no}: {exc}") from exc
