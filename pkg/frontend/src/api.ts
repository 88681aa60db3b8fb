/** Typed client for the planner service. The transport is injectable so tests
 * can intercept every payload the UI consumes. */

import type {
  EvaluationPayload,
  LonLat,
  RecommendPayload,
  ScenarioCreated,
  ScenarioState,
  SnapshotSummary,
  StationsPayload,
  ZonesPayload,
} from "./types.js";

export type Transport = (
  method: "GET" | "POST" | "PUT",
  path: string,
  body?: unknown,
) => Promise<unknown>;

export function fetchTransport(baseUrl: string, fetchFn: typeof fetch = fetch): Transport {
  return async (method, path, body) => {
    const response = await fetchFn(baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new Error(`${method} ${path} failed: ${response.status} ${await response.text()}`);
    }
    return response.json();
  };
}

export class PlannerClient {
  constructor(private readonly transport: Transport) {}

  summary(): Promise<SnapshotSummary> {
    return this.transport("GET", "/api/snapshot/summary") as Promise<SnapshotSummary>;
  }

  stations(month: string): Promise<StationsPayload> {
    return this.transport(
      "GET",
      `/api/stations?month=${encodeURIComponent(month)}`,
    ) as Promise<StationsPayload>;
  }

  zones(): Promise<ZonesPayload> {
    return this.transport("GET", "/api/zones") as Promise<ZonesPayload>;
  }

  createScenario(month: string): Promise<ScenarioCreated> {
    return this.transport("POST", "/api/scenario", { month }) as Promise<ScenarioCreated>;
  }

  addPin(scenarioId: string, pin: LonLat): Promise<ScenarioState> {
    return this.transport("PUT", `/api/scenario/${scenarioId}/candidates`, {
      add: [pin],
    }) as Promise<ScenarioState>;
  }

  removePin(scenarioId: string, pin: LonLat): Promise<ScenarioState> {
    return this.transport("PUT", `/api/scenario/${scenarioId}/candidates`, {
      remove: [pin],
    }) as Promise<ScenarioState>;
  }

  evaluate(scenarioId: string): Promise<EvaluationPayload> {
    return this.transport(
      "GET",
      `/api/scenario/${scenarioId}/evaluate`,
    ) as Promise<EvaluationPayload>;
  }

  recommend(n: number, month: string): Promise<RecommendPayload> {
    return this.transport("POST", "/api/recommend", { n, month }) as Promise<RecommendPayload>;
  }
}
