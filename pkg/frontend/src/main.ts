// Browser bootstrap: wires the store, API client, stream client and views
// onto the static page regions in index.html.

import { ApiClient } from "./api";
import {
  renderHoldingsTable,
  renderOlhcChart,
  renderProductNav,
  renderSurface,
  renderVarPanel,
} from "./dom";
import { Store } from "./state";
import { StreamClient } from "./stream";
import { CalculateView } from "./views/calculate";
import { DEFAULT_POLL_MS, PortfolioView } from "./views/portfolio";
import { MarketView } from "./views/market";
import type { Model } from "./types";

function required<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing page region #${id}`);
  return node as T;
}

export function boot(baseUrl: string = ""): void {
  const wsUrl = `${baseUrl.replace(/^http/, "ws") || `ws://${location.host}`}/ws`;
  const store = new Store();
  const api = new ApiClient(baseUrl);
  const stream = new StreamClient(wsUrl);
  stream.connect();

  const portfolio = new PortfolioView(api, store);
  const calculate = new CalculateView(api, store);
  const market = new MarketView(stream, store);

  const holdingsBox = required("holdings");
  const varBox = required("var-card");
  const navBox = required("product-nav");
  const chart = required<HTMLCanvasElement>("olhc-chart");
  const surfaceBox = required("vol-surface");

  store.subscribe((state) => {
    renderHoldingsTable(state, holdingsBox);
    renderVarPanel(state, varBox);
    renderProductNav(state, navBox, (sym) => market.selectProduct(sym));
    renderOlhcChart(state, chart);
    renderSurface(state, surfaceBox);
  });

  holdingsBox.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const instrument = target.dataset?.instrument;
    const pid = store.get().selectedPid;
    if (instrument && pid) void portfolio.removePosition(pid, instrument);
  });

  const form = required<HTMLFormElement>("add-position");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void portfolio.addPosition(
      String(data.get("pid") || "default"),
      String(data.get("instrument") || ""),
      Number(data.get("quantity") || 0),
    );
  });

  const calcForm = required<HTMLFormElement>("calculate-form");
  calcForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(calcForm);
    calculate.setInputs({
      pid: String(data.get("pid") || store.get().selectedPid || "default"),
      model: String(data.get("model") || "HAR") as Model,
      confidence: Number(data.get("confidence") || 0.95),
      horizonDays: Number(data.get("horizon") || 1),
    });
    void calculate.calculate();
  });

  void api.instruments().then((instruments) => {
    store.update({ instruments });
    const first = instruments.products[0];
    if (first) market.selectProduct(first.id);
    market.selectUnderlying(store.get().selectedUnderlying);
  });
  portfolio.startPolling(DEFAULT_POLL_MS);
}

declare global {
  interface Window {
    cryptovarBoot: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.cryptovarBoot = boot;
}
