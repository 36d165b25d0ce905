// Debounce with injectable timers (testable with a fake clock) and a
// latest-only async runner that aborts superseded requests.

export interface TimerHost {
  setTimeout(fn: () => void, ms: number): number;
  clearTimeout(handle: number): void;
}

const realTimers: TimerHost = {
  setTimeout: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clearTimeout: (h) => clearTimeout(h),
};

/**
 * Collapses a burst of trigger() calls into one fn() invocation delayMs
 * after the last call.
 */
export class Debouncer {
  private handle: number | null = null;

  constructor(
    private readonly delayMs: number,
    private readonly fn: () => void,
    private readonly timers: TimerHost = realTimers,
  ) {}

  trigger(): void {
    if (this.handle !== null) this.timers.clearTimeout(this.handle);
    this.handle = this.timers.setTimeout(() => {
      this.handle = null;
      this.fn();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.handle !== null) {
      this.timers.clearTimeout(this.handle);
      this.handle = null;
    }
  }

  get pending(): boolean {
    return this.handle !== null;
  }
}

/**
 * Runs at most one request at a time; starting a new one aborts the
 * previous. Stale results are dropped, never delivered out of order.
 */
export class LatestOnly {
  private controller: AbortController | null = null;
  private ticket = 0;

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const ticket = ++this.ticket;
    try {
      const result = await task(controller.signal);
      return ticket === this.ticket ? result : null;
    } catch (err) {
      if ((err as Error).name === "AbortError") return null;
      if (ticket !== this.ticket) return null;
      throw err;
    }
  }
}
