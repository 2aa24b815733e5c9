// Market views: product lists grouped by underlying (options additionally
// by maturity), the OLHC chart stream and the vol-surface stream. Chart
// subscriptions are always parameterized by the current selection; a
// selection change tears down and re-subscribes.

import type { Store } from "../state";
import type { StreamClient } from "../stream";
import type {
  InstrumentsPayload,
  OlhcFramePayload,
  ProductRow,
  SurfaceFramePayload,
  SurfacePointPayload,
} from "../types";

export interface ProductGroups {
  futures: Map<string, ProductRow[]>;               // underlying -> rows
  options: Map<string, Map<string, ProductRow[]>>;  // underlying -> maturity -> rows
}

export function groupProducts(instruments: InstrumentsPayload): ProductGroups {
  const futures = new Map<string, ProductRow[]>();
  const options = new Map<string, Map<string, ProductRow[]>>();
  for (const row of instruments.products) {
    if (row.kind === "future") {
      const list = futures.get(row.underlying) ?? [];
      list.push(row);
      futures.set(row.underlying, list);
    } else {
      const maturity = row.maturity ?? "?";
      const byMaturity = options.get(row.underlying) ?? new Map<string, ProductRow[]>();
      const list = byMaturity.get(maturity) ?? [];
      list.push(row);
      byMaturity.set(maturity, list);
      options.set(row.underlying, byMaturity);
    }
  }
  for (const list of futures.values()) list.sort((a, b) => a.id.localeCompare(b.id));
  for (const byMaturity of options.values()) {
    for (const list of byMaturity.values()) {
      list.sort((a, b) => (a.strike ?? 0) - (b.strike ?? 0));
    }
  }
  return { futures, options };
}

export interface SurfaceGrid {
  maturities: string[];
  strikes: number[];
  // implied vol by [maturity index][strike index]; null where no quote
  cells: (number | null)[][];
}

export function surfaceGrid(points: SurfacePointPayload[]): SurfaceGrid {
  const maturities = [...new Set(points.map((p) => p.maturity))].sort();
  const strikes = [...new Set(points.map((p) => p.strike))].sort((a, b) => a - b);
  const strikeIndex = new Map(strikes.map((s, i) => [s, i]));
  const maturityIndex = new Map(maturities.map((m, i) => [m, i]));
  const cells: (number | null)[][] = maturities.map(() => strikes.map(() => null));
  for (const p of points) {
    const mi = maturityIndex.get(p.maturity);
    const si = strikeIndex.get(p.strike);
    if (mi !== undefined && si !== undefined) cells[mi][si] = p.implied_vol;
  }
  return { maturities, strikes, cells };
}

export class MarketView {
  constructor(
    private stream: StreamClient,
    private store: Store,
  ) {}

  /** Select a product: the OLHC stream switches to it. */
  selectProduct(sym: string, intervalMinutes = 1): void {
    this.store.update({ selectedProduct: sym, lastOlhc: null, streamStale: false });
    this.stream.subscribe(
      "olhc",
      { sym, interval_minutes: intervalMinutes },
      (frame) => {
        if (frame.gap) {
          this.store.update({ streamStale: true });
          return;
        }
        const payload = frame.data as OlhcFramePayload;
        // frames for a stale selection are dropped, not rendered
        if (payload.sym === this.store.get().selectedProduct) {
          this.store.update({ lastOlhc: payload, streamStale: false });
        }
      },
    );
  }

  /** Select an underlying: the vol-surface stream switches to it. */
  selectUnderlying(underlying: string): void {
    this.store.update({ selectedUnderlying: underlying, lastSurface: null });
    this.stream.subscribe("volsurface", { underlying }, (frame) => {
      if (frame.gap) {
        this.store.update({ streamStale: true });
        return;
      }
      const payload = frame.data as SurfaceFramePayload;
      if (payload.underlying === this.store.get().selectedUnderlying) {
        this.store.update({ lastSurface: payload, streamStale: false });
      }
    });
  }

  selectMaturity(maturity: string | null): void {
    this.store.update({ selectedMaturity: maturity });
  }
}
