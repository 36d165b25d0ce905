// Typed client for the twinwatch HTTP API. fetch is injectable so tests
// can run without a network or DOM.

import type {
  CameraSpec,
  HeatmapGrid,
  LayoutDoc,
  OptimizeEvent,
  ReportDoc,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly fields: { field: string; msg: string }[],
    message: string,
  ) {
    super(message);
  }
}

async function raiseForStatus(r: Response): Promise<void> {
  if (r.ok) return;
  let fields: { field: string; msg: string }[] = [];
  let message = `HTTP ${r.status}`;
  try {
    const body = await r.json();
    if (Array.isArray(body.detail)) {
      fields = body.detail;
      message = body.detail.map((d: { field: string; msg: string }) =>
        `${d.field}: ${d.msg}`).join("; ");
    } else if (typeof body.detail === "string") {
      message = body.detail;
    }
  } catch {
    // non-JSON error body: keep the status message
  }
  throw new ApiError(r.status, fields, message);
}

export interface SimulateParams {
  cameras: CameraSpec[];
  period: string;
  scenarios: number[];
  mode: string;
  seed: number;
  replications: number;
  replicationMinutes: number;
}

export class PlannerApi {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const r = await this.fetchFn(this.base + path);
    await raiseForStatus(r);
    return (await r.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown,
                            signal?: AbortSignal): Promise<T> {
    const r = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    await raiseForStatus(r);
    return (await r.json()) as T;
  }

  getLayout(): Promise<LayoutDoc> {
    return this.getJson<LayoutDoc>("/api/layout");
  }

  getHealth(): Promise<{ status: string; version: string }> {
    return this.getJson("/api/health");
  }

  heatmap(cameras: CameraSpec[], cellSize: number,
          signal?: AbortSignal): Promise<HeatmapGrid> {
    return this.postJson<HeatmapGrid>("/api/heatmap",
      { cameras, cell_size: cellSize }, signal);
  }

  simulate(params: SimulateParams, signal?: AbortSignal): Promise<ReportDoc> {
    return this.postJson<ReportDoc>("/api/simulate", {
      cameras: params.cameras,
      period: params.period,
      scenarios: params.scenarios,
      mode: params.mode,
      seed: params.seed,
      replications: params.replications,
      replication_minutes: params.replicationMinutes,
    }, signal);
  }

  /**
   * Streams newline-delimited optimize events, invoking onEvent for each
   * as it arrives; resolves when the stream closes.
   */
  async optimizeStream(
    body: unknown,
    onEvent: (e: OptimizeEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const r = await this.fetchFn(this.base + "/api/optimize", {
      method: "POST",
      headers: {
        "content-type": "application/json",
        accept: "application/x-ndjson",
      },
      body: JSON.stringify(body),
      signal,
    });
    await raiseForStatus(r);
    if (!r.body) {
      // fallback for non-streaming transports: one JSON document
      const doc = await r.json();
      onEvent({ type: "result", ...doc } as OptimizeEvent);
      return;
    }
    const reader = r.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let idx;
      while ((idx = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, idx).trim();
        buffer = buffer.slice(idx + 1);
        if (line) onEvent(JSON.parse(line) as OptimizeEvent);
      }
    }
    const tail = buffer.trim();
    if (tail) onEvent(JSON.parse(tail) as OptimizeEvent);
  }
}
