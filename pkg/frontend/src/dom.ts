// Thin DOM renderer: turns store state into tables, the VaR card, an
// OLHC canvas and the vol-surface heatmap. All values come straight from
// payloads; this layer only formats.

import { formatMs, formatPercent, formatTime, formatUsd } from "./format";
import type { ViewState } from "./state";
import { renderVarCard } from "./views/calculate";
import { groupProducts, surfaceGrid } from "./views/market";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderHoldingsTable(state: ViewState, container: HTMLElement): void {
  container.replaceChildren();
  if (state.serverDown) {
    container.appendChild(el("div", "banner error", "server unreachable"));
    return;
  }
  const table = el("table", "holdings");
  const head = el("tr");
  for (const title of ["instrument", "underlying", "kind", "quantity", ""]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);
  for (const row of state.holdings) {
    const tr = el("tr");
    tr.appendChild(el("td", undefined, row.instrument));
    tr.appendChild(el("td", undefined, row.underlying));
    tr.appendChild(el("td", undefined, row.kind));
    tr.appendChild(el("td", "num", String(row.quantity)));
    const remove = el("button", "remove", "x");
    remove.dataset.instrument = row.instrument;
    const cell = el("td");
    cell.appendChild(remove);
    tr.appendChild(cell);
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderVarPanel(state: ViewState, container: HTMLElement): void {
  container.replaceChildren();
  if (state.lastVarError) {
    container.appendChild(el("div", "banner error", state.lastVarError));
    return;
  }
  if (!state.lastVar) {
    container.appendChild(el("div", "muted", "no calculation yet"));
    return;
  }
  const card = renderVarCard(state.lastVar);
  const box = el("div", "var-card");
  box.appendChild(el("h3", undefined, `${formatPercent(card.confidence, 1)} ${card.horizonDays}d VaR (${card.model})`));
  box.appendChild(el("div", "var-value", formatUsd(card.varValue)));
  box.appendChild(el("div", undefined, `return quantile ${formatPercent(card.qReturn, 3)}`));
  box.appendChild(el("div", undefined, `portfolio value ${formatUsd(card.portfolioValue)}`));
  box.appendChild(
    el("div", undefined, `skew ${card.moments.skew.toFixed(4)}  kurtosis ${card.moments.kurt.toFixed(4)}`),
  );
  if (card.validityWarning) {
    box.appendChild(el("div", "badge warn", "outside Cornish-Fisher validity domain"));
  }
  box.appendChild(
    el(
      "div",
      "latency",
      `t1 ${formatMs(card.latency.t1)} · t2 ${formatMs(card.latency.t2)} · ` +
        `t3 ${formatMs(card.latency.t3)} · total ${formatMs(card.latency.total)}`,
    ),
  );
  container.appendChild(box);
}

export function renderProductNav(
  state: ViewState,
  container: HTMLElement,
  onSelect: (sym: string) => void,
): void {
  container.replaceChildren();
  if (!state.instruments) return;
  const groups = groupProducts(state.instruments);
  for (const [underlying, futures] of groups.futures) {
    container.appendChild(el("h4", undefined, `${underlying} futures`));
    for (const row of futures) {
      const item = el("div", "nav-item", row.id);
      item.onclick = () => onSelect(row.id);
      container.appendChild(item);
    }
  }
  for (const [underlying, byMaturity] of groups.options) {
    container.appendChild(el("h4", undefined, `${underlying} options`));
    for (const [maturity, rows] of byMaturity) {
      if (state.selectedMaturity && maturity !== state.selectedMaturity) continue;
      container.appendChild(el("h5", undefined, maturity));
      for (const row of rows) {
        const item = el("div", "nav-item", row.id);
        item.onclick = () => onSelect(row.id);
        container.appendChild(item);
      }
    }
  }
}

export function renderOlhcChart(state: ViewState, canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const frame = state.lastOlhc;
  if (!frame || frame.bars.length === 0) return;
  const bars = frame.bars;
  const lows = bars.map((b) => b.low);
  const highs = bars.map((b) => b.high);
  const min = Math.min(...lows);
  const max = Math.max(...highs);
  const span = max - min || 1;
  const width = canvas.width / bars.length;
  const y = (price: number) => canvas.height - ((price - min) / span) * canvas.height;
  bars.forEach((bar, i) => {
    const x = i * width + width / 2;
    ctx.strokeStyle = bar.close >= bar.open ? "#2e7d32" : "#c62828";
    ctx.beginPath();
    ctx.moveTo(x, y(bar.low));
    ctx.lineTo(x, y(bar.high));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    const top = Math.min(y(bar.open), y(bar.close));
    const height = Math.max(Math.abs(y(bar.open) - y(bar.close)), 1);
    ctx.fillRect(x - width * 0.3, top, width * 0.6, height);
  });
  if (state.streamStale) {
    ctx.fillStyle = "#f9a825";
    ctx.fillText("stream gap: stale", 8, 14);
  }
}

export function renderSurface(state: ViewState, container: HTMLElement): void {
  container.replaceChildren();
  const frame = state.lastSurface;
  if (!frame || frame.points.length === 0) {
    container.appendChild(el("div", "muted", "no surface yet"));
    return;
  }
  const grid = surfaceGrid(frame.points);
  const table = el("table", "surface");
  const head = el("tr");
  head.appendChild(el("th", undefined, "maturity \\ strike"));
  for (const strike of grid.strikes) head.appendChild(el("th", "num", String(strike)));
  table.appendChild(head);
  const flat = grid.cells.flat().filter((v): v is number => v !== null);
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  grid.maturities.forEach((maturity, mi) => {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, maturity));
    grid.strikes.forEach((_, si) => {
      const value = grid.cells[mi][si];
      const cell = el("td", "num", value === null ? "" : formatPercent(value, 1));
      if (value !== null && hi > lo) {
        const heat = (value - lo) / (hi - lo);
        cell.style.backgroundColor = `hsl(${240 - 240 * heat}, 70%, 80%)`;
      }
      tr.appendChild(cell);
    });
    table.appendChild(tr);
  });
  container.appendChild(table);
  container.appendChild(
    el("div", "muted", `as of ${formatTime(Date.now())} · ${frame.points.length} quotes`),
  );
}
