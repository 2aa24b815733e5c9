// Portfolio builder: add/remove intents plus a polling holdings table.
// Holdings state comes only from server polls, so the table reflects any
// change within one poll cycle.

import type { ApiClient } from "../api";
import { ApiError } from "../api";
import type { Store } from "../state";

export const DEFAULT_POLL_MS = 2000;

export class PortfolioView {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    private store: Store,
  ) {}

  async addPosition(pid: string, instrument: string, quantity: number): Promise<void> {
    await this.api.addPosition(pid, instrument, quantity);
    if (this.store.get().selectedPid === null) {
      this.store.update({ selectedPid: pid });
    }
  }

  async removePosition(pid: string, instrument: string): Promise<void> {
    await this.api.removePosition(pid, instrument);
  }

  /** One poll: refresh holdings for the selected portfolio. */
  async poll(): Promise<void> {
    const pid = this.store.get().selectedPid;
    if (pid === null) return;
    try {
      const payload = await this.api.positions(pid);
      this.store.update({ holdings: payload.positions, serverDown: false });
    } catch (err) {
      if (err instanceof ApiError && err.status === 0) {
        this.store.update({ serverDown: true });
        return;
      }
      throw err;
    }
  }

  startPolling(intervalMs: number = DEFAULT_POLL_MS): void {
    this.stopPolling();
    this.timer = setInterval(() => {
      void this.poll();
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
