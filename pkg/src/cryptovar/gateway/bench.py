"""Latency benchmark: synthetic universe, warm caches, portfolio sweeps."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from cryptovar.marketdata.bars import DAY_MS, MINUTE_MS
from cryptovar.synth.simulate import feed_ticks, make_universe, sv_index_paths
from cryptovar.tickengine.service import TickEngine
from cryptovar.varengine.engine import VarEngine
from cryptovar.varengine.portfolio import PortfolioBook

HOLDING_STEPS = (1, 5, 10, 20, 50, 100, 200, 500, 1000)


@dataclass
class BenchRow:
    holdings: int
    model: str
    t1_ms: float
    t2_ms: float
    t3_ms: float
    total_ms: float
    lookup_ms: float


@dataclass
class BenchResult:
    rows: list[BenchRow]
    full_universe_row: BenchRow | None
    universe_size: int

    def __str__(self) -> str:
        lines = [
            f"universe: {self.universe_size} products",
            f"{'holdings':>9} {'model':>6} {'t1(ms)':>9} {'t2(ms)':>9} "
            f"{'t3(ms)':>9} {'total(ms)':>10} {'lookup(ms)':>11}",
        ]
        rows = list(self.rows)
        if self.full_universe_row:
            rows.append(self.full_universe_row)
        for r in rows:
            lines.append(
                f"{r.holdings:>9} {r.model:>6} {r.t1_ms:>9.3f} {r.t2_ms:>9.3f} "
                f"{r.t3_ms:>9.3f} {r.total_ms:>10.3f} {r.lookup_ms:>11.4f}"
            )
        return "\n".join(lines)


def build_bench_engine(
    seed: int = 11,
    lookback_days: int = 16,
    options_per_underlying: int = 646,
) -> tuple[TickEngine, VarEngine, PortfolioBook, list[str]]:
    """Engine preloaded with index history and one quote per product.

    The default universe is ~1300 products on two underlyings (futures
    plus option chains), mirroring the full derivative universe scale.
    """
    n_minutes = lookback_days * 1440
    start_ms = 19_000 * DAY_MS
    paths = sv_index_paths(("BTC", "ETH"), n_minutes, seed=seed)
    engine = TickEngine.__new__(TickEngine)  # type: ignore[misc]
    TickEngine.__init__(engine, data_root=_scratch_dir(), log_path=None)

    # index history feeds inference; products only need a fresh quote
    engine.ingest(list(feed_ticks(paths, start_ms)))
    universe = make_universe(
        start_ms + n_minutes * MINUTE_MS,
        options_per_underlying=options_per_underlying,
    )
    last_minute = start_ms + (n_minutes - 1) * MINUTE_MS
    final_prices = {sym: paths[sym][-1:] for sym in paths}
    engine.ingest(
        list(feed_ticks(final_prices, last_minute, universe, vol_for_quotes=0.45))
    )
    book = PortfolioBook()
    var_engine = VarEngine(engine, book)
    product_ids = sorted(engine.snapshot().product)
    return engine, var_engine, book, product_ids


def _scratch_dir() -> str:
    import tempfile

    return tempfile.mkdtemp(prefix="cryptovar-bench-")


def time_lookup(engine: TickEngine, instrument_ids: list[str]) -> float:
    """Milliseconds to read latest quotes for the instruments (local cache)."""
    snapshot = engine.snapshot()
    t0 = time.perf_counter()
    for instrument_id in instrument_ids:
        _ = snapshot.product[instrument_id]
    return (time.perf_counter() - t0) * 1000.0


def run_bench(
    max_holdings: int = 1000,
    model: str = "EWMA",
    repetitions: int = 100,
    seed: int = 11,
    full_universe: bool = False,
) -> BenchResult:
    engine, var_engine, book, product_ids = build_bench_engine(seed=seed)
    rng = np.random.default_rng(seed)

    steps = [h for h in HOLDING_STEPS if h <= max_holdings]
    if max_holdings not in steps:
        steps.append(max_holdings)
    rows = []
    for holdings in steps:
        pid = f"bench-{holdings}"
        chosen = rng.choice(len(product_ids), size=min(holdings, len(product_ids)), replace=False)
        for idx in chosen:
            book.add(pid, product_ids[idx], float(rng.choice([1.0, 2.0, -1.0])))
        rows.append(_time_portfolio(var_engine, engine, book, pid, model, repetitions, product_ids))

    full_row = None
    if full_universe:
        pid = "bench-full"
        for instrument_id in product_ids:
            book.add(pid, instrument_id, 1.0)
        full_row = _time_portfolio(
            var_engine, engine, book, pid, model, repetitions, product_ids
        )
    return BenchResult(rows=rows, full_universe_row=full_row, universe_size=len(product_ids))


def _time_portfolio(
    var_engine: VarEngine,
    engine: TickEngine,
    book: PortfolioBook,
    pid: str,
    model: str,
    repetitions: int,
    product_ids: list[str],
) -> BenchRow:
    holdings = len(book.positions(pid))
    var_engine.estimate_var(pid, 0.95, 1.0, model=model)  # warm caches
    t1 = t2 = t3 = total = 0.0
    for _ in range(repetitions):
        result = var_engine.estimate_var(pid, 0.95, 1.0, model=model)
        lat = result.latency
        t1 += lat.t1_ms
        t2 += lat.t2_ms
        t3 += lat.t3_ms
        total += lat.total_ms
    lookup_ids = product_ids[: min(1000, len(product_ids))]
    lookup = min(time_lookup(engine, lookup_ids) for _ in range(5))
    n = repetitions
    return BenchRow(
        holdings=holdings,
        model=model,
        t1_ms=t1 / n,
        t2_ms=t2 / n,
        t3_ms=t3 / n,
        total_ms=total / n,
        lookup_ms=lookup,
    )
