// Calculate view: pid/model/confidence/horizon -> var-estimate -> VaR card.
// Card values are copied verbatim from the API payload (the UI computes
// no finance math of its own).

import type { ApiClient } from "../api";
import { ApiError } from "../api";
import type { Store } from "../state";
import type { Model, VarPayload } from "../types";

export interface VarCard {
  pid: string;
  model: string;
  confidence: number;
  horizonDays: number;
  varValue: number;
  qReturn: number;
  portfolioValue: number;
  zCf: number;
  moments: { mu1: number; mu2: number; mu3: number; mu4: number; skew: number; kurt: number };
  validityWarning: boolean;
  latency: { t1: number; t2: number; t3: number; epsilon: number; total: number };
  syms: string[];
}

export function validateInputs(confidence: number, horizonDays: number): string | null {
  if (!(confidence > 0.5 && confidence < 1)) {
    return "confidence must be between 0.5 and 1";
  }
  if (!(horizonDays > 0)) {
    return "horizon must be a positive number of days";
  }
  return null;
}

export function renderVarCard(payload: VarPayload): VarCard {
  return {
    pid: payload.pid,
    model: payload.model,
    confidence: payload.confidence,
    horizonDays: payload.horizon_days,
    varValue: payload.var_value,
    qReturn: payload.q_return,
    portfolioValue: payload.portfolio_value,
    zCf: payload.z_cf,
    moments: {
      mu1: payload.moments.mu1,
      mu2: payload.moments.mu2,
      mu3: payload.moments.mu3,
      mu4: payload.moments.mu4,
      skew: payload.moments.skew,
      kurt: payload.moments.kurt,
    },
    validityWarning: !payload.valid,
    latency: {
      t1: payload.latency.t1_ms,
      t2: payload.latency.t2_ms,
      t3: payload.latency.t3_ms,
      epsilon: payload.latency.t_epsilon_ms,
      total: payload.latency.total_ms,
    },
    syms: [...payload.syms],
  };
}

export class CalculateView {
  constructor(
    private api: ApiClient,
    private store: Store,
  ) {}

  setInputs(patch: { pid?: string; model?: Model; confidence?: number; horizonDays?: number }): void {
    const update: Record<string, unknown> = {};
    if (patch.pid !== undefined) update.selectedPid = patch.pid;
    if (patch.model !== undefined) update.model = patch.model;
    if (patch.confidence !== undefined) update.confidence = patch.confidence;
    if (patch.horizonDays !== undefined) update.horizonDays = patch.horizonDays;
    this.store.update(update);
  }

  /** Run the estimate for the current selections; returns the card. */
  async calculate(): Promise<VarCard | null> {
    const state = this.store.get();
    if (state.selectedPid === null) {
      this.store.update({ lastVarError: "select a portfolio first" });
      return null;
    }
    const inputError = validateInputs(state.confidence, state.horizonDays);
    if (inputError !== null) {
      this.store.update({ lastVarError: inputError });
      return null;
    }
    try {
      const payload = await this.api.varEstimate(
        state.selectedPid,
        state.confidence,
        state.horizonDays,
        state.model,
      );
      this.store.update({ lastVar: payload, lastVarError: null });
      return renderVarCard(payload);
    } catch (err) {
      if (err instanceof ApiError) {
        this.store.update({ lastVar: null, lastVarError: `${err.code}: ${err.message}` });
        return null;
      }
      throw err;
    }
  }
}
