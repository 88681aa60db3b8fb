/** Stateful in-memory stand-in for the planner service, mirroring its
 * scenario semantics: pins accumulate via PUT, evaluation payloads derive
 * deterministically from the current pin set, and removing a pin restores the
 * exact baseline payload. Every response is recorded so tests can assert that
 * displayed numbers trace back to intercepted payload fields. */

import type { Transport } from "../src/api.js";
import type {
  CandidateResult,
  EvaluationPayload,
  LonLat,
  VariableReport,
} from "../src/types.js";

const BASE_BEFORE: VariableReport[] = [
  {
    variable: "ethnicity",
    groups: [
      { label: "Black", w: 3, mean_wptal: 1.25 },
      { label: "White", w: 5, mean_wptal: 20.5 },
    ],
    W: 8,
    mu: 13.28125,
    gini: 0.42,
  },
  {
    variable: "income",
    groups: [
      { label: "low", w: 4, mean_wptal: 2.0 },
      { label: "high", w: 4, mean_wptal: 22.0 },
    ],
    W: 8,
    mu: 12.0,
    gini: 0.41,
  },
];

function afterReports(pinCount: number): VariableReport[] {
  if (pinCount === 0) {
    return JSON.parse(JSON.stringify(BASE_BEFORE)) as VariableReport[];
  }
  // each pin lands in the underserved groups and lifts their means
  return [
    {
      variable: "ethnicity",
      groups: [
        { label: "Black", w: 3 + pinCount, mean_wptal: 1.25 + 2.5 * pinCount },
        { label: "White", w: 5, mean_wptal: 20.5 },
      ],
      W: 8 + pinCount,
      mu: 13.0,
      gini: 0.42 - 0.03 * pinCount,
    },
    {
      variable: "income",
      groups: [
        { label: "low", w: 4 + pinCount, mean_wptal: 2.0 + 2.5 * pinCount },
        { label: "high", w: 4, mean_wptal: 22.0 },
      ],
      W: 8 + pinCount,
      mu: 12.5,
      gini: 0.41 - 0.04 * pinCount,
    },
  ];
}

export class FakeService {
  pins: LonLat[] = [];
  served: EvaluationPayload[] = [];
  putCalls = 0;

  readonly transport: Transport = async (method, path, body) => {
    if (method === "GET" && path === "/api/snapshot/summary") {
      return {
        schema_version: "1",
        counts: { stations: 8, entrances: 2, schedules: 2, zones: 4, pois: 0, nodes: 9, edges: 12 },
        bbox: [0, 0, 0.02, 0.02],
      };
    }
    if (method === "POST" && path === "/api/scenario") {
      return { schema_version: "1", scenario_id: "sc0001", month: (body as { month: string }).month };
    }
    if (method === "PUT" && path === "/api/scenario/sc0001/candidates") {
      const edit = body as { add?: LonLat[]; remove?: LonLat[] };
      this.putCalls += 1;
      for (const pin of edit.add ?? []) {
        this.pins.push(pin);
      }
      for (const pin of edit.remove ?? []) {
        this.pins = this.pins.filter((p) => !(p[0] === pin[0] && p[1] === pin[1]));
      }
      return {
        schema_version: "1",
        scenario_id: "sc0001",
        month: "2025-01",
        added: [...this.pins],
        removed_station_ids: [],
      };
    }
    if (method === "GET" && path === "/api/scenario/sc0001/evaluate") {
      const candidates: CandidateResult[] = this.pins.map((pin, i) => ({
        candidate_id: `sc0001_p${String(i).padStart(3, "0")}`,
        location: pin,
        ok: true,
        ptal: 4.25 + i,
        demand: 1.75 + 0.5 * i,
        wptal: (4.25 + i) * (1.75 + 0.5 * i),
      }));
      const before = JSON.parse(JSON.stringify(BASE_BEFORE)) as VariableReport[];
      const after = afterReports(this.pins.length);
      const payload: EvaluationPayload = {
        schema_version: "1",
        scenario_id: "sc0001",
        month: "2025-01",
        candidates,
        removed_station_ids: [],
        equity_before: before,
        equity_after: after,
        gini_deltas: {
          ethnicity: (after[0].gini ?? 0) - (before[0].gini ?? 0),
          income: (after[1].gini ?? 0) - (before[1].gini ?? 0),
        },
      };
      this.served.push(payload);
      return payload;
    }
    throw new Error(`unexpected request: ${method} ${path}`);
  };
}
