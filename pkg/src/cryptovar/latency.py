"""Per-stage latency instrumentation for the calculation workflow.

Total response time decomposes as t = t1 + t2 + t3 + t_epsilon (inference,
mapping, transformation, remainder), measured on the monotonic clock.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass(frozen=True)
class LatencyReport:
    t1_ms: float
    t2_ms: float
    t3_ms: float
    t_epsilon_ms: float
    total_ms: float
    space_bytes: int | None = None

    def as_dict(self) -> dict:
        d = {
            "t1_ms": self.t1_ms,
            "t2_ms": self.t2_ms,
            "t3_ms": self.t3_ms,
            "t_epsilon_ms": self.t_epsilon_ms,
            "total_ms": self.total_ms,
        }
        if self.space_bytes is not None:
            d["space_bytes"] = self.space_bytes
        return d


@dataclass
class StageTimer:
    """Accumulates named stage durations around a total span."""

    _t0: float = field(default_factory=time.perf_counter)
    _stages: dict = field(default_factory=dict)

    class _Span:
        def __init__(self, timer: "StageTimer", name: str):
            self.timer, self.name = timer, name

        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.timer._stages[self.name] = (
                self.timer._stages.get(self.name, 0.0)
                + (time.perf_counter() - self.start) * 1000.0
            )
            return False

    def stage(self, name: str) -> "StageTimer._Span":
        return StageTimer._Span(self, name)

    def report(self, space_bytes: int | None = None) -> LatencyReport:
        total = (time.perf_counter() - self._t0) * 1000.0
        t1 = self._stages.get("inference", 0.0)
        t2 = self._stages.get("mapping", 0.0)
        t3 = self._stages.get("transformation", 0.0)
        return LatencyReport(
            t1_ms=t1,
            t2_ms=t2,
            t3_ms=t3,
            t_epsilon_ms=max(total - t1 - t2 - t3, 0.0),
            total_ms=max(total, t1 + t2 + t3),
            space_bytes=space_bytes,
        )
