// Wire types mirroring the gateway's JSON payloads. The dashboard never
// computes finance math: every displayed number originates from one of
// these payloads.

export interface Envelope<T> {
  request_id: string;
  ok: boolean;
  data?: T;
  error?: { code: string; message: string };
}

export interface IndexRow {
  id: string;
  kind: "index";
  price: number;
  time: number;
}

export interface ProductRow {
  id: string;
  underlying: string;
  kind: "future" | "option";
  maturity: string | null;
  strike: number | null;
  option_type: "call" | "put" | null;
  mark_price: number;
  time: number;
}

export interface InstrumentsPayload {
  indices: IndexRow[];
  products: ProductRow[];
}

export interface PositionRow {
  instrument: string;
  underlying: string;
  kind: string;
  quantity: number;
}

export interface PositionsPayload {
  pid: string;
  positions: PositionRow[];
}

export interface MomentsPayload {
  mu1: number;
  mu2: number;
  mu3: number;
  mu4: number;
  skew: number;
  kurt: number;
}

export interface LatencyPayload {
  t1_ms: number;
  t2_ms: number;
  t3_ms: number;
  t_epsilon_ms: number;
  total_ms: number;
}

export interface VarPayload {
  pid: string;
  confidence: number;
  horizon_days: number;
  model: string;
  z_cf: number;
  q_return: number;
  var_value: number;
  portfolio_value: number;
  moments: MomentsPayload;
  valid: boolean;
  syms: string[];
  latency: LatencyPayload;
}

export interface OlhcBarPayload {
  start: number;
  open: number;
  low: number;
  high: number;
  close: number;
  count: number;
}

export interface OlhcFramePayload {
  sym: string;
  interval_minutes: number;
  bars: OlhcBarPayload[];
}

export interface SurfacePointPayload {
  instrument: string;
  maturity: string;
  strike: number;
  implied_vol: number;
}

export interface SurfaceFramePayload {
  underlying: string;
  points: SurfacePointPayload[];
}

export interface StreamFrame {
  channel: string;
  seq: number;
  gap?: boolean;
  data: unknown;
}

export type Model = "EWMA" | "GARCH" | "HAR";
