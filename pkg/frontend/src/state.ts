/** UI scenario state: reconstructible from service responses at any time, so
 * a refresh (or test replay) rebuilds an identical view. */

import type { EvaluationPayload, LonLat } from "./types.js";

export type GroupingVariable = "ethnicity" | "income";

export interface UiScenarioState {
  scenarioId: string | null;
  month: string;
  pendingPins: LonLat[];
  lastEvaluation: EvaluationPayload | null;
  grouping: GroupingVariable;
}

export function initialState(month: string): UiScenarioState {
  return {
    scenarioId: null,
    month,
    pendingPins: [],
    lastEvaluation: null,
    // income is the default grouping: it carries the strongest disparity signal
    grouping: "income",
  };
}

export function withScenario(state: UiScenarioState, scenarioId: string): UiScenarioState {
  return { ...state, scenarioId };
}

export function samePin(a: LonLat, b: LonLat): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

export function withPinAdded(state: UiScenarioState, pin: LonLat): UiScenarioState {
  return { ...state, pendingPins: [...state.pendingPins, pin] };
}

export function withPinRemoved(state: UiScenarioState, pin: LonLat): UiScenarioState {
  return { ...state, pendingPins: state.pendingPins.filter((p) => !samePin(p, pin)) };
}

export function withEvaluation(
  state: UiScenarioState,
  evaluation: EvaluationPayload,
): UiScenarioState {
  return { ...state, lastEvaluation: evaluation };
}

export function withGrouping(state: UiScenarioState, grouping: GroupingVariable): UiScenarioState {
  return { ...state, grouping };
}
