// In-memory stand-in for the gateway: same envelopes, same payload
// shapes, deterministic pseudo-random VaR numbers.

import type { FetchLike } from "../src/api";
import type {
  PositionRow,
  StreamFrame,
  VarPayload,
} from "../src/types";
import type { SocketFactory, WebSocketLike } from "../src/stream";

function jsonResponse(status: number, body: unknown): Response {
  return {
    status,
    json: async () => body,
  } as unknown as Response;
}

let requestCounter = 0;

export class MockServer {
  books = new Map<string, Map<string, PositionRow>>();
  varRequests: Array<{ pid: string; confidence: number; horizon_days: number; model: string }> = [];
  private seed = 42;

  private rand(): number {
    // deterministic LCG so scripted interactions are reproducible
    this.seed = (this.seed * 1103515245 + 12345) % 2147483648;
    return this.seed / 2147483648;
  }

  varPayload(pid: string, confidence: number, horizonDays: number, model: string): VarPayload {
    const sigma = 0.01 + 0.04 * this.rand();
    const q = -(1 + this.rand()) * sigma;
    const value = 50_000 + 100_000 * this.rand();
    return {
      pid,
      confidence,
      horizon_days: horizonDays,
      model,
      z_cf: -(1.5 + this.rand()),
      q_return: q,
      var_value: q * value,
      portfolio_value: value,
      moments: {
        mu1: 0.0005 * (this.rand() - 0.5),
        mu2: sigma * sigma,
        mu3: 1e-6 * (this.rand() - 0.5),
        mu4: 3 * sigma ** 4 * (1 + 0.2 * this.rand()),
        skew: 0.4 * (this.rand() - 0.5),
        kurt: 3 + this.rand(),
      },
      valid: this.rand() > 0.3,
      syms: ["BTC", "ETH"],
      latency: {
        t1_ms: 10 * this.rand(),
        t2_ms: this.rand(),
        t3_ms: 0.1 * this.rand(),
        t_epsilon_ms: 0.05,
        total_ms: 12 * this.rand() + 1,
      },
    };
  }

  private ok(data: unknown): Response {
    return jsonResponse(200, { request_id: `r${requestCounter++}`, ok: true, data });
  }

  private err(status: number, code: string, message: string): Response {
    return jsonResponse(status, {
      request_id: `r${requestCounter++}`,
      ok: false,
      error: { code, message },
    });
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(String(init.body)) : null;

    let match = path.match(/^\/portfolios\/([^/]+)\/positions$/);
    if (match && method === "GET") {
      const book = this.books.get(decodeURIComponent(match[1]));
      return this.ok({
        pid: decodeURIComponent(match[1]),
        positions: book ? [...book.values()] : [],
      });
    }
    if (match && method === "POST") {
      const pid = decodeURIComponent(match[1]);
      const { instrument, quantity } = body as { instrument: string; quantity: number };
      if (instrument.includes("--")) return this.err(400, "ParseError", "bad id");
      const book = this.books.get(pid) ?? new Map<string, PositionRow>();
      const existing = book.get(instrument);
      const next = (existing?.quantity ?? 0) + quantity;
      if (next === 0) book.delete(instrument);
      else {
        book.set(instrument, {
          instrument,
          underlying: instrument.split("-")[0],
          kind: instrument.split("-").length === 4 ? "option" : "future",
          quantity: next,
        });
      }
      this.books.set(pid, book);
      return this.ok({ pid, instrument, quantity: next, removed: next === 0 });
    }
    match = path.match(/^\/portfolios\/([^/]+)\/positions\/([^/]+)$/);
    if (match && method === "DELETE") {
      const pid = decodeURIComponent(match[1]);
      const instrument = decodeURIComponent(match[2]);
      const book = this.books.get(pid);
      if (!book?.delete(instrument)) {
        return this.err(404, "UnknownPortfolioError", "no such position");
      }
      return this.ok({ pid, removed: instrument });
    }
    if (path === "/var-estimate" && method === "POST") {
      const request = body as { pid: string; confidence: number; horizon_days: number; model: string };
      this.varRequests.push(request);
      const book = this.books.get(request.pid);
      if (!book) return this.err(404, "UnknownPortfolioError", "unknown pid");
      if (book.size === 0) return this.err(409, "DegeneratePortfolioError", "empty portfolio");
      if (!["EWMA", "GARCH", "HAR"].includes(request.model)) {
        return this.err(400, "ValidationError", "unknown model");
      }
      return this.ok(
        this.varPayload(request.pid, request.confidence, request.horizon_days, request.model),
      );
    }
    if (path === "/health") return this.ok({ status: "ok" });
    if (path === "/portfolios") return this.ok({ pids: [...this.books.keys()].sort() });
    return this.err(404, "NotFound", path);
  };
}

export class FakeSocket implements WebSocketLike {
  sent: string[] = [];
  onmessage: ((event: { data: string }) => void) | null = null;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  closed = false;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  open(): void {
    this.onopen?.();
  }

  push(frame: StreamFrame): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

export function fakeSocketFactory(): { factory: SocketFactory; sockets: FakeSocket[] } {
  const sockets: FakeSocket[] = [];
  const factory: SocketFactory = () => {
    const socket = new FakeSocket();
    sockets.push(socket);
    return socket;
  };
  return { factory, sockets };
}
