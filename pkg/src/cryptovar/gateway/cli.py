"""Operator command line: replay, serve, backtest, bench, persist-eod."""

from __future__ import annotations

import logging
import os
import sys
import time
from datetime import date, datetime
from pathlib import Path

import click
from cryptovar.backtest.campaign import load_config, run_backtest_campaign
from cryptovar.synth.simulate import feed_ticks, make_universe, sv_index_paths
from cryptovar.tickengine.records import read_feed_file, write_feed_file
from cryptovar.tickengine.service import TickEngine
from cryptovar.varengine.engine import VarEngine
from cryptovar.varengine.portfolio import PortfolioBook

logger = logging.getLogger(__name__)

ROOT_ENV = "CRYPTOVAR_ROOT"
PORT_ENV = "CRYPTOVAR_PORT"


def _default_root() -> str:
    return os.environ.get(ROOT_ENV, "./cryptovar-data")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """Real-time VaR engine for crypto derivative portfolios."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.argument("feedfile", type=click.Path(exists=True))
@click.option("--root", default=None, help=f"Data root (default ${ROOT_ENV} or ./cryptovar-data).")
@click.option("--log", "log_path", default=None, help="Recovery log path (default <root>/tickerplant.log).")
@click.option("--speed", default="max", show_default=True,
              help="Replay speed: 'max' or 'xN' wall-clock multiplier.")
@click.option("--persist/--no-persist", default=True, show_default=True,
              help="Persist each completed UTC day to the HDB.")
def replay(feedfile: str, root: str | None, log_path: str | None, speed: str, persist: bool) -> None:
    """Replay a recorded feed file through the tick engine."""
    root = Path(root or _default_root())
    log_path = Path(log_path) if log_path else root / "tickerplant.log"
    engine = TickEngine(root, log_path=log_path)

    multiplier = None
    if speed != "max":
        if not speed.startswith("x"):
            raise click.BadParameter("--speed must be 'max' or 'xN'")
        multiplier = float(speed[1:])

    count = 0
    batch = []
    last_day = None
    wall_start = time.monotonic()
    feed_start = None
    from cryptovar.tickengine.hdb import day_of_ms

    for tick in read_feed_file(feedfile):
        if multiplier is not None:
            if feed_start is None:
                feed_start = tick.time
            target = (tick.time - feed_start) / 1000.0 / multiplier
            lag = target - (time.monotonic() - wall_start)
            if lag > 0:
                time.sleep(lag)
        day = day_of_ms(tick.time)
        if persist and last_day is not None and day != last_day:
            if batch:
                engine.ingest(batch)
                batch = []
            engine.end_of_day_persist(last_day)
        last_day = day
        batch.append(tick)
        if len(batch) >= 4096:
            engine.ingest(batch)
            count += len(batch)
            batch = []
    if batch:
        engine.ingest(batch)
        count += len(batch)
    engine.close()
    click.echo(f"replayed {count} ticks into {root}")


@main.command()
@click.option("--root", default=None)
@click.option("--log", "log_path", default=None)
@click.option("--replay", "replay_file", default=None, type=click.Path(exists=True),
              help="Feed file to preload before serving.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help=f"Port (default ${PORT_ENV} or 8072).")
@click.option("--ui", "ui_dir", default=None, type=click.Path(exists=True),
              help="Serve the dashboard from this directory (frontend/ after npm run build).")
def serve(root: str | None, log_path: str | None, replay_file: str | None,
          host: str, port: int | None, ui_dir: str | None) -> None:
    """Serve the HTTP/WebSocket API (and optionally the dashboard)."""
    import uvicorn

    from cryptovar.gateway.api import EngineContext, create_app

    root = Path(root or _default_root())
    log_path = Path(log_path) if log_path else root / "tickerplant.log"
    engine = TickEngine(root, log_path=log_path)
    if replay_file:
        count = engine.ingest(list(read_feed_file(replay_file)))
        click.echo(f"preloaded feed through seq {count}")
    book = PortfolioBook()
    ctx = EngineContext(
        tick_engine=engine, book=book, var_engine=VarEngine(engine, book)
    )
    app = create_app(ctx, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port or int(os.environ.get(PORT_ENV, "8072")))


@main.command()
@click.argument("config", type=click.Path(exists=True))
@click.argument("feedfile", type=click.Path(exists=True))
@click.option("--root", default=None, help="Scratch data root for the campaign replay.")
@click.option("--out", "out_dir", default="./backtest-out", show_default=True)
def backtest(config: str, feedfile: str, root: str | None, out_dir: str) -> None:
    """Run a VaR backtest campaign over a recorded feed."""
    cfg = load_config(config)
    root = Path(root or (_default_root() + "-backtest"))
    result = run_backtest_campaign(read_feed_file(feedfile), cfg, root, out_dir=out_dir)
    click.echo(f"campaign complete: {len(result.sample_times)} samples")
    for report in result.coverage:
        click.echo(
            f"  coverage {report.extras['model']}@{report.extras['level']}: "
            f"observed {int(report.statistic)} / expected {report.extras['expected']:.1f} "
            f"(p={report.p_value:.3f}, {report.decision})"
        )
    total = 3 * len(cfg.levels)
    for model, score in result.passes.items():
        click.echo(f"  {model}: passes {score}/{total}")
    click.echo(f"tables written to {out_dir}")


@main.command("synth-feed")
@click.argument("outfile", type=click.Path())
@click.option("--days", default=2.0, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--options-per-underlying", default=0, show_default=True)
@click.option("--start", default="2023-06-01T00:00:00Z", show_default=True)
@click.option("--product-interval-minutes", default=1, show_default=True)
def synth_feed(outfile: str, days: float, seed: int, options_per_underlying: int,
               start: str, product_interval_minutes: int) -> None:
    """Generate a synthetic recorded feed (the stand-in for live capture)."""
    from cryptovar.tickengine.records import parse_time

    start_ms = parse_time(start)
    n_minutes = int(days * 1440)
    paths = sv_index_paths(("BTC", "ETH"), n_minutes, seed=seed)
    universe = make_universe(start_ms, options_per_underlying=options_per_underlying)
    count = write_feed_file(
        outfile,
        feed_ticks(paths, start_ms, universe,
                   product_interval_minutes=product_interval_minutes),
    )
    click.echo(f"wrote {count} ticks to {outfile}")


@main.command("persist-eod")
@click.argument("day")
@click.option("--root", default=None)
@click.option("--log", "log_path", default=None,
              help="Recovery log to rebuild state from (default <root>/tickerplant.log).")
def persist_eod(day: str, root: str | None, log_path: str | None) -> None:
    """Persist one UTC day from the recovery log into the HDB."""
    root = Path(root or _default_root())
    log_path = Path(log_path) if log_path else root / "tickerplant.log"
    if not log_path.exists():
        click.echo(f"no recovery log at {log_path}", err=True)
        sys.exit(1)
    try:
        target = datetime.strptime(day, "%Y-%m-%d").date()
    except ValueError:
        try:
            target = datetime.strptime(day, "%Y.%m.%d").date()
        except ValueError:
            click.echo(f"bad date {day!r} (want YYYY-MM-DD)", err=True)
            sys.exit(1)
    engine = TickEngine(root)
    replayed = engine.replay(log_path)
    released = engine.end_of_day_persist(target)
    engine.close()
    click.echo(f"replayed {replayed} records, persisted {target} ({released})")


@main.command()
@click.option("--holdings", default=1000, show_default=True,
              help="Largest portfolio size in the sweep.")
@click.option("--model", default="EWMA", show_default=True)
@click.option("--repetitions", default=100, show_default=True)
@click.option("--seed", default=11, show_default=True)
@click.option("--full-universe", is_flag=True,
              help="Also time a portfolio holding every generated product.")
def bench(holdings: int, model: str, repetitions: int, seed: int, full_universe: bool) -> None:
    """Latency benchmark over synthetic portfolios of increasing size."""
    from cryptovar.gateway.bench import run_bench

    table = run_bench(
        max_holdings=holdings,
        model=model,
        repetitions=repetitions,
        seed=seed,
        full_universe=full_universe,
    )
    click.echo(table)


if __name__ == "__main__":
    main()
