import { describe, expect, it } from "vitest";
import { ApiError, PlannerApi } from "../src/api.js";
import { bestSoFar } from "../src/state.js";
import type { OptimizeEvent } from "../src/types.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function ndjsonResponse(lines: unknown[]): Response {
  // two chunks with a line split across them, to exercise buffering
  const text = lines.map((l) => JSON.stringify(l) + "\n").join("");
  const mid = Math.floor(text.length / 2);
  const enc = new TextEncoder();
  const stream = new ReadableStream<Uint8Array>({
    start(controller) {
      controller.enqueue(enc.encode(text.slice(0, mid)));
      controller.enqueue(enc.encode(text.slice(mid)));
      controller.close();
    },
  });
  return new Response(stream, {
    status: 200,
    headers: { "content-type": "application/x-ndjson" },
  });
}

describe("PlannerApi", () => {
  it("fetches and returns typed layout documents", async () => {
    const api = new PlannerApi("", async (url) => {
      expect(url).toBe("/api/layout");
      return jsonResponse({ name: "test", presets: [] });
    });
    const layout = await api.getLayout();
    expect(layout.name).toBe("test");
  });

  it("raises ApiError with field details on 422", async () => {
    const api = new PlannerApi("", async () =>
      jsonResponse({ detail: [{ field: "preset", msg: "unknown" }] }, 422));
    const err = await api
      .simulate({
        cameras: [], period: "Morning", scenarios: [3], mode: "stochastic",
        seed: 0, replications: 1, replicationMinutes: 10,
      })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.fields[0].field).toBe("preset");
  });

  it("sends the simulate body in wire format", async () => {
    let sent: Record<string, unknown> = {};
    const api = new PlannerApi("", async (_url, init) => {
      sent = JSON.parse(String(init?.body));
      return jsonResponse({ cells: [], plan: {}, provenance: {} });
    });
    await api.simulate({
      cameras: [], period: "Midday", scenarios: [1, 2], mode: "geometric",
      seed: 7, replications: 2, replicationMinutes: 15,
    });
    expect(sent.period).toBe("Midday");
    expect(sent.scenarios).toEqual([1, 2]);
    expect(sent.replication_minutes).toBe(15);
  });

  it("parses ndjson optimize streams across chunk boundaries", async () => {
    const lines = [
      { type: "progress", iteration: 0, objective: 0.4, best: 0.4 },
      { type: "progress", iteration: 1, objective: 0.2, best: 0.4 },
      { type: "progress", iteration: 2, objective: 0.7, best: 0.7 },
      {
        type: "result", cameras: [], initial_objective: 0.4,
        final_objective: 0.7, converged: true, evaluations: 3,
      },
    ];
    const api = new PlannerApi("", async (_url, init) => {
      expect((init?.headers as Record<string, string>).accept)
        .toBe("application/x-ndjson");
      return ndjsonResponse(lines);
    });
    const events: OptimizeEvent[] = [];
    await api.optimizeStream({}, (e) => events.push(e));
    expect(events).toHaveLength(4);
    expect(events[3].type).toBe("result");

    // trace chart input is monotone non-decreasing
    const objectives = events
      .filter((e): e is Extract<OptimizeEvent, { type: "progress" }> =>
        e.type === "progress")
      .map((e) => e.objective);
    const best = bestSoFar(objectives);
    expect(best).toEqual([0.4, 0.4, 0.7]);
    for (let i = 1; i < best.length; i++) {
      expect(best[i]).toBeGreaterThanOrEqual(best[i - 1]);
    }
  });

  it("surfaces plain-string error detail", async () => {
    const api = new PlannerApi("", async () =>
      jsonResponse({ detail: "budget must be at least 1" }, 409));
    const err = await api.optimizeStream({}, () => {}).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toMatch(/budget/);
  });
});
