/** UI integration at the logic level: what-if round trips, payload
 * traceability, and the dashboard's no-recomputation contract. */

import { describe, expect, it } from "vitest";

import { PlannerClient } from "../src/api.js";
import { dashboardFromEvaluation } from "../src/dashboard.js";
import {
  initialState,
  withEvaluation,
  withPinAdded,
  withPinRemoved,
  withScenario,
} from "../src/state.js";
import { FakeService } from "./fakeService.js";

function collectNumbers(value: unknown, out: number[] = []): number[] {
  if (typeof value === "number") {
    out.push(value);
  } else if (Array.isArray(value)) {
    for (const v of value) {
      collectNumbers(v, out);
    }
  } else if (value !== null && typeof value === "object") {
    for (const v of Object.values(value)) {
      collectNumbers(v, out);
    }
  }
  return out;
}

describe("what-if dashboard", () => {
  it("add then remove restores the baseline dashboard exactly", async () => {
    const service = new FakeService();
    const client = new PlannerClient(service.transport);
    let state = initialState("2025-01");
    state = withScenario(state, (await client.createScenario("2025-01")).scenario_id);

    const baselinePayload = await client.evaluate(state.scenarioId!);
    const baseline = dashboardFromEvaluation(baselinePayload);

    const pin: [number, number] = [0.011, 0.007];
    await client.addPin(state.scenarioId!, pin);
    state = withPinAdded(state, pin);
    const withPin = dashboardFromEvaluation(await client.evaluate(state.scenarioId!));
    expect(withPin.candidates).toHaveLength(1);
    expect(withPin).not.toEqual(baseline);

    await client.removePin(state.scenarioId!, pin);
    state = withPinRemoved(state, pin);
    const restored = dashboardFromEvaluation(await client.evaluate(state.scenarioId!));
    expect(restored).toEqual(baseline);
    expect(state.pendingPins).toEqual([]);
  });

  it("every dashboard number equals a field in the intercepted payload", async () => {
    const service = new FakeService();
    const client = new PlannerClient(service.transport);
    const sid = (await client.createScenario("2025-01")).scenario_id;
    await client.addPin(sid, [0.011, 0.007]);
    await client.addPin(sid, [0.004, 0.016]);
    const model = dashboardFromEvaluation(await client.evaluate(sid));

    const payload = service.served[service.served.length - 1];
    const payloadNumbers = new Set(collectNumbers(payload));
    for (const n of collectNumbers(model)) {
      expect(payloadNumbers.has(n), `dashboard value ${n} not found in payload`).toBe(true);
    }
  });

  it("gini bars copy before/after/delta verbatim", async () => {
    const service = new FakeService();
    const client = new PlannerClient(service.transport);
    const sid = (await client.createScenario("2025-01")).scenario_id;
    await client.addPin(sid, [0.011, 0.007]);
    const payload = await client.evaluate(sid);
    const model = dashboardFromEvaluation(payload);
    const income = model.giniBars.find((b) => b.variable === "income")!;
    expect(income.before).toBe(payload.equity_before[1].gini);
    expect(income.after).toBe(payload.equity_after[1].gini);
    expect(income.delta).toBe(payload.gini_deltas.income);
  });

  it("failed candidates surface the service error without metrics", () => {
    const model = dashboardFromEvaluation({
      schema_version: "1",
      scenario_id: "sc0001",
      month: "2025-01",
      candidates: [
        { candidate_id: "sc0001_p000", location: [9, 9], ok: false, error: "off-network" },
      ],
      removed_station_ids: [],
      equity_before: [],
      equity_after: [],
      gini_deltas: { ethnicity: null, income: null },
    });
    expect(model.candidates[0].error).toBe("off-network");
    expect(model.candidates[0].wptal).toBeNull();
  });

  it("state refresh reconstructs the same dashboard from the service", async () => {
    const service = new FakeService();
    const client = new PlannerClient(service.transport);
    let state = initialState("2025-01");
    state = withScenario(state, (await client.createScenario("2025-01")).scenario_id);
    await client.addPin(state.scenarioId!, [0.011, 0.007]);
    state = withPinAdded(state, [0.011, 0.007]);
    state = withEvaluation(state, await client.evaluate(state.scenarioId!));

    // a "refresh": rebuild purely from a fresh evaluate call
    const rebuilt = dashboardFromEvaluation(await client.evaluate(state.scenarioId!));
    expect(rebuilt).toEqual(dashboardFromEvaluation(state.lastEvaluation!));
  });
});
