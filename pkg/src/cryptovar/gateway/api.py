"""HTTP and WebSocket surface over the tick and VaR engines.

Every HTTP response is an envelope carrying the originating request id:
``{"request_id": ..., "ok": true, "data": ...}`` on success or
``{"request_id": ..., "ok": false, "error": {"code", "message"}}`` on
failure. WebSocket subscriptions push ``{"channel", "seq", "data"}``
frames; slow consumers get a drop-oldest queue and a gap notice frame.
"""

from __future__ import annotations

import asyncio
import itertools
import logging
import uuid
from dataclasses import dataclass

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from cryptovar.errors import (
    CryptoVarError,
    DegeneratePortfolioError,
    DomainError,
    InsufficientDataError,
    ParseError,
    StaleDataError,
    UnknownPortfolioError,
    ValidationError,
)
from cryptovar.marketdata.instruments import parse_instrument
from cryptovar.tickengine.service import TickEngine
from cryptovar.varengine.engine import VarEngine
from cryptovar.varengine.portfolio import PortfolioBook

logger = logging.getLogger(__name__)

_ERROR_STATUS = (
    (ValidationError, 400),
    (ParseError, 400),
    (UnknownPortfolioError, 404),
    (DegeneratePortfolioError, 409),
    (StaleDataError, 503),
    (InsufficientDataError, 409),
    (DomainError, 400),
)


@dataclass
class EngineContext:
    tick_engine: TickEngine
    book: PortfolioBook
    var_engine: VarEngine
    var_stream_interval_s: float = 2.0
    volsurface_interval_s: float = 1.0


class PositionRequest(BaseModel):
    instrument: str
    quantity: float


class VarRequest(BaseModel):
    pid: str
    confidence: float = Field(default=0.95)
    horizon_days: float = Field(default=1.0)
    model: str = Field(default="HAR")


def _status_for(exc: CryptoVarError) -> int:
    for klass, status in _ERROR_STATUS:
        if isinstance(exc, klass):
            return status
    return 500


def _request_id(request: Request) -> str:
    return request.headers.get("x-request-id") or uuid.uuid4().hex


def _ok(request_id: str, data) -> JSONResponse:
    return JSONResponse({"request_id": request_id, "ok": True, "data": data})


def _err(request_id: str, exc: CryptoVarError) -> JSONResponse:
    status = _status_for(exc)
    payload = {
        "request_id": request_id,
        "ok": False,
        "error": {"code": type(exc).__name__, "message": str(exc)},
    }
    return JSONResponse(payload, status_code=status)


def create_app(ctx: EngineContext, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="cryptovar", docs_url=None, redoc_url=None)
    app.state.ctx = ctx

    @app.exception_handler(CryptoVarError)
    async def engine_error_handler(request: Request, exc: CryptoVarError):
        return _err(_request_id(request), exc)

    @app.get("/health")
    async def health(request: Request):
        index_count, product_count = ctx.tick_engine.latest.sizes()
        return _ok(
            _request_id(request),
            {
                "status": "ok",
                "published": ctx.tick_engine.tickerplant.published,
                "latest_time": ctx.tick_engine.latest_time(),
                "index_symbols": index_count,
                "products": product_count,
            },
        )

    @app.get("/instruments")
    async def instruments(request: Request):
        snapshot = ctx.tick_engine.snapshot()
        rows = []
        for sym in sorted(snapshot.product):
            try:
                inst = parse_instrument(sym)
            except ParseError:
                continue
            quote = snapshot.product[sym]
            rows.append(
                {
                    "id": sym,
                    "underlying": inst.underlying,
                    "kind": inst.kind,
                    "maturity": inst.maturity.isoformat() if inst.maturity else None,
                    "strike": inst.strike,
                    "option_type": inst.option_type,
                    "mark_price": quote.mark_price,
                    "time": quote.time,
                }
            )
        indices = [
            {"id": sym, "kind": "index", "price": q.price, "time": q.time}
            for sym, q in sorted(snapshot.index.items())
        ]
        return _ok(_request_id(request), {"indices": indices, "products": rows})

    @app.get("/portfolios")
    async def portfolios(request: Request):
        return _ok(_request_id(request), {"pids": ctx.book.pids()})

    @app.get("/portfolios/{pid}/positions")
    async def list_positions(pid: str, request: Request):
        rows = [
            {
                "instrument": p.instrument.id,
                "underlying": p.instrument.underlying,
                "kind": p.instrument.kind,
                "quantity": p.quantity,
            }
            for p in ctx.book.positions(pid)
        ]
        return _ok(_request_id(request), {"pid": pid, "positions": rows})

    @app.post("/portfolios/{pid}/positions")
    async def add_position(pid: str, body: PositionRequest, request: Request):
        position = ctx.book.add(pid, body.instrument, body.quantity)
        return _ok(
            _request_id(request),
            {
                "pid": pid,
                "instrument": body.instrument,
                "quantity": position.quantity if position else 0.0,
                "removed": position is None,
            },
        )

    @app.delete("/portfolios/{pid}/positions/{instrument_id}")
    async def remove_position(pid: str, instrument_id: str, request: Request):
        ctx.book.remove(pid, instrument_id)
        return _ok(_request_id(request), {"pid": pid, "removed": instrument_id})

    @app.post("/var-estimate")
    async def var_estimate(body: VarRequest, request: Request):
        if not ctx.book.known(body.pid):
            raise UnknownPortfolioError(f"unknown portfolio {body.pid!r}")
        result = await asyncio.to_thread(
            ctx.var_engine.estimate_var,
            body.pid,
            body.confidence,
            body.horizon_days,
            body.model,
        )
        return _ok(_request_id(request), result.as_dict())

    @app.websocket("/ws")
    async def websocket_endpoint(socket: WebSocket):
        await socket.accept()
        session = _StreamSession(ctx, socket)
        try:
            await session.run()
        except WebSocketDisconnect:
            pass
        finally:
            session.stop()

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


class _StreamSession:
    """One WebSocket connection multiplexing subscription channels."""

    QUEUE_LIMIT = 64

    def __init__(self, ctx: EngineContext, socket: WebSocket):
        self.ctx = ctx
        self.socket = socket
        self.queue: asyncio.Queue = asyncio.Queue()
        self.dropped = 0
        self.tasks: list[asyncio.Task] = []
        self.seq = itertools.count()

    def stop(self) -> None:
        for task in self.tasks:
            task.cancel()

    async def _push(self, channel: str, data) -> None:
        if self.queue.qsize() >= self.QUEUE_LIMIT:
            # drop-oldest keeps ingestion unblocked; tell the consumer
            try:
                self.queue.get_nowait()
            except asyncio.QueueEmpty:
                pass
            self.dropped += 1
            await self.queue.put(
                {"channel": channel, "seq": next(self.seq), "gap": True,
                 "data": {"dropped": self.dropped}}
            )
            return
        await self.queue.put({"channel": channel, "seq": next(self.seq), "data": data})

    async def run(self) -> None:
        sender = asyncio.create_task(self._sender())
        self.tasks.append(sender)
        while True:
            message = await self.socket.receive_json()
            op = message.get("op")
            if op == "subscribe":
                await self._subscribe(message.get("channel"), message.get("params") or {})
            elif op == "unsubscribe":
                self.stop()
                self.tasks = [sender]
            else:
                await self._push("error", {"message": f"unknown op {op!r}"})

    async def _sender(self) -> None:
        while True:
            frame = await self.queue.get()
            await self.socket.send_json(frame)

    async def _subscribe(self, channel: str | None, params: dict) -> None:
        if channel == "olhc":
            self.tasks.append(asyncio.create_task(self._olhc_loop(params)))
        elif channel == "volsurface":
            self.tasks.append(asyncio.create_task(self._surface_loop(params)))
        elif channel == "var":
            self.tasks.append(asyncio.create_task(self._var_loop(params)))
        else:
            await self._push("error", {"message": f"unknown channel {channel!r}"})

    async def _olhc_loop(self, params: dict) -> None:
        sym = params.get("sym", "")
        interval = int(params.get("interval_minutes", 1))
        cadence = float(params.get("cadence_s", 1.0))
        while True:
            bars = self.ctx.tick_engine.streaming.olhc(sym, interval)
            await self._push(
                "olhc",
                {
                    "sym": sym,
                    "interval_minutes": interval,
                    "bars": [
                        {
                            "start": b.start, "open": b.open, "low": b.low,
                            "high": b.high, "close": b.close, "count": b.count,
                        }
                        for b in bars[-int(params.get("depth", 120)):]
                    ],
                },
            )
            await asyncio.sleep(cadence)

    async def _surface_loop(self, params: dict) -> None:
        underlying = params.get("underlying", "BTC")
        while True:
            surface = self.ctx.tick_engine.streaming.vol_surface(underlying)
            await self._push("volsurface", {"underlying": underlying, "points": surface})
            await asyncio.sleep(
                float(params.get("cadence_s", self.ctx.volsurface_interval_s))
            )

    async def _var_loop(self, params: dict) -> None:
        pid = params.get("pid", "")
        confidence = float(params.get("confidence", 0.95))
        horizon = float(params.get("horizon_days", 1.0))
        model = params.get("model", "HAR")
        cadence = float(params.get("cadence_s", self.ctx.var_stream_interval_s))
        while True:
            try:
                result = await asyncio.to_thread(
                    self.ctx.var_engine.estimate_var, pid, confidence, horizon, model
                )
                await self._push("var", result.as_dict())
            except CryptoVarError as exc:
                await self._push(
                    "var", {"pid": pid, "error": {"code": type(exc).__name__, "message": str(exc)}}
                )
            await asyncio.sleep(cadence)
