// View state: current selections plus the latest payloads behind each
// component. Selection changes notify subscribers so charts re-query with
// the new parameters (no chart renders without its selection context).

import type {
  InstrumentsPayload,
  Model,
  OlhcFramePayload,
  PositionRow,
  SurfaceFramePayload,
  VarPayload,
} from "./types";

export interface ViewState {
  selectedProduct: string | null;
  selectedUnderlying: string;
  selectedMaturity: string | null;
  selectedPid: string | null;
  model: Model;
  confidence: number;
  horizonDays: number;
  instruments: InstrumentsPayload | null;
  holdings: PositionRow[];
  lastVar: VarPayload | null;
  lastVarError: string | null;
  lastOlhc: OlhcFramePayload | null;
  lastSurface: SurfaceFramePayload | null;
  streamStale: boolean;
  serverDown: boolean;
}

export function initialState(): ViewState {
  return {
    selectedProduct: null,
    selectedUnderlying: "BTC",
    selectedMaturity: null,
    selectedPid: null,
    model: "HAR",
    confidence: 0.95,
    horizonDays: 1,
    instruments: null,
    holdings: [],
    lastVar: null,
    lastVarError: null,
    lastOlhc: null,
    lastSurface: null,
    streamStale: false,
    serverDown: false,
  };
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = initialState();
  private listeners = new Set<Listener>();

  get(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}
