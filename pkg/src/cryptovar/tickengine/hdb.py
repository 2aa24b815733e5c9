"""Date-partitioned, column-split historical storage.

Layout: ``<root>/<YYYY.MM.DD>/<table>/<column>`` plus a ``manifest`` JSON
per date. Column files are a length-prefixed binary layout; the manifest
is written last via atomic rename, so readers ignore partitions whose
manifest is missing or incomplete and re-persisting a date is an
idempotent swap.
"""

from __future__ import annotations

import json
import logging
import os
import struct
from datetime import date, datetime, timezone
from pathlib import Path

import numpy as np

from cryptovar.errors import ContractViolation
from cryptovar.marketdata.bars import DAY_MS

logger = logging.getLogger(__name__)

_MAGIC = b"CVCOL1\n"
_DTYPES = {"i8": np.int64, "f8": np.float64}


def partition_name(day: date) -> str:
    return day.strftime("%Y.%m.%d")


def day_start_ms(day: date) -> int:
    return int(datetime(day.year, day.month, day.day, tzinfo=timezone.utc).timestamp() * 1000)


def day_of_ms(time_ms: int) -> date:
    return datetime.fromtimestamp((time_ms // DAY_MS) * DAY_MS / 1000, tz=timezone.utc).date()


def _write_column(path: Path, values) -> dict:
    if isinstance(values, np.ndarray):
        code = "i8" if values.dtype.kind in "iu" else "f8"
        data = np.ascontiguousarray(values.astype(_DTYPES[code])).tobytes()
        header = {"dtype": code, "rows": int(len(values))}
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<B", 0))  # numeric
            fh.write(struct.pack("<2sQ", code.encode(), len(values)))
            fh.write(data)
        return header
    # string column: per-value uint32 length prefix + utf-8 payload
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<B", 1))  # string
        fh.write(struct.pack("<2sQ", b"s ", len(values)))
        for value in values:
            raw = value.encode()
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
    return {"dtype": "str", "rows": len(values)}


def _read_column(path: Path):
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ContractViolation(f"{path}: bad column file magic")
        (kind,) = struct.unpack("<B", fh.read(1))
        code, rows = struct.unpack("<2sQ", fh.read(10))
        if kind == 0:
            dtype = _DTYPES[code.decode()]
            return np.frombuffer(fh.read(rows * 8), dtype=dtype)
        out = []
        for _ in range(rows):
            (length,) = struct.unpack("<I", fh.read(4))
            out.append(fh.read(length).decode())
        return out


class PartitionedStore:
    """On-disk store of daily table partitions with column pruning."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _manifest_path(self, day: date) -> Path:
        return self.root / partition_name(day) / "manifest"

    def write_partition(self, day: date, tables: dict[str, dict]) -> None:
        """Persist per-table column dicts for one date (idempotent)."""
        part_dir = self.root / partition_name(day)
        part_dir.mkdir(parents=True, exist_ok=True)
        manifest: dict = {"date": partition_name(day), "tables": {}}
        for table_name, columns in tables.items():
            lengths = {len(v) for v in columns.values()}
            if len(lengths) > 1:
                raise ContractViolation(f"{table_name}: ragged columns {lengths}")
            table_dir = part_dir / table_name
            table_dir.mkdir(exist_ok=True)
            table_meta = {"rows": lengths.pop() if lengths else 0, "columns": {}}
            for column_name, values in columns.items():
                meta = _write_column(table_dir / column_name, values)
                table_meta["columns"][column_name] = meta
            manifest["tables"][table_name] = table_meta
        tmp = part_dir / "manifest.tmp"
        tmp.write_text(json.dumps(manifest, indent=1))
        os.replace(tmp, self._manifest_path(day))

    def manifest(self, day: date) -> dict | None:
        path = self._manifest_path(day)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError:
            logger.warning("%s: unreadable manifest ignored", path)
            return None

    def dates(self) -> list[date]:
        """Complete partitions only (manifest present and parseable)."""
        out = []
        if not self.root.exists():
            return out
        for child in sorted(self.root.iterdir()):
            try:
                day = datetime.strptime(child.name, "%Y.%m.%d").date()
            except ValueError:
                continue
            if self.manifest(day) is not None:
                out.append(day)
        return out

    def has_partition(self, day: date) -> bool:
        return self.manifest(day) is not None

    def read_columns(self, day: date, table: str, columns: tuple[str, ...]):
        """Materialize only the named column files of one partition table."""
        manifest = self.manifest(day)
        if manifest is None or table not in manifest["tables"]:
            return None
        table_dir = self.root / partition_name(day) / table
        return {name: _read_column(table_dir / name) for name in columns}

    def query_twap(self, table: str, sym: str, lo_ms: int, hi_ms: int):
        """(minutes, twaps) for one sym over [lo_ms, hi_ms), disk only.

        Reads only the sym/minute/twap columns of the partitions the range
        touches.
        """
        minutes_out: list[np.ndarray] = []
        twaps_out: list[np.ndarray] = []
        for day in self.dates():
            start = day_start_ms(day)
            if start + DAY_MS <= lo_ms or start >= hi_ms:
                continue
            data = self.read_columns(day, table, ("sym", "minute", "twap"))
            if data is None or not len(data["minute"]):
                continue
            syms = np.asarray(data["sym"], dtype=object)
            minutes = data["minute"]
            mask = (syms == sym) & (minutes >= lo_ms) & (minutes < hi_ms)
            if mask.any():
                minutes_out.append(minutes[mask])
                twaps_out.append(data["twap"][mask])
        if not minutes_out:
            return np.empty(0, dtype=np.int64), np.empty(0)
        minutes = np.concatenate(minutes_out)
        twaps = np.concatenate(twaps_out)
        order = np.argsort(minutes, kind="stable")
        return minutes[order], twaps[order]
