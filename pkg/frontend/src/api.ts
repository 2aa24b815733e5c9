// Thin HTTP client over the gateway's enveloped JSON API.

import type {
  Envelope,
  InstrumentsPayload,
  PositionsPayload,
  VarPayload,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError("network", String(err), 0);
    }
    const body = (await response.json()) as Envelope<T>;
    if (!body.ok || body.data === undefined) {
      const error = body.error ?? { code: "unknown", message: "no error body" };
      throw new ApiError(error.code, error.message, response.status);
    }
    return body.data;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.call<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<{ status: string }> {
    return this.call("/health");
  }

  instruments(): Promise<InstrumentsPayload> {
    return this.call("/instruments");
  }

  portfolios(): Promise<{ pids: string[] }> {
    return this.call("/portfolios");
  }

  positions(pid: string): Promise<PositionsPayload> {
    return this.call(`/portfolios/${encodeURIComponent(pid)}/positions`);
  }

  addPosition(pid: string, instrument: string, quantity: number): Promise<unknown> {
    return this.post(`/portfolios/${encodeURIComponent(pid)}/positions`, {
      instrument,
      quantity,
    });
  }

  removePosition(pid: string, instrument: string): Promise<unknown> {
    return this.call(
      `/portfolios/${encodeURIComponent(pid)}/positions/${encodeURIComponent(instrument)}`,
      { method: "DELETE" },
    );
  }

  varEstimate(
    pid: string,
    confidence: number,
    horizonDays: number,
    model: string,
  ): Promise<VarPayload> {
    return this.post("/var-estimate", {
      pid,
      confidence,
      horizon_days: horizonDays,
      model,
    });
  }
}
