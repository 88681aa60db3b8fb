/** Dashboard view model: a verbatim projection of the evaluation payload.
 *
 * No number is computed here — every displayed value is copied from a service
 * response field, which the integration tests assert by interception.
 */

import type { EvaluationPayload, VariableReport } from "./types.js";

export interface CandidateLine {
  candidateId: string;
  location: [number, number];
  ok: boolean;
  ptal: number | null;
  demand: number | null;
  wptal: number | null;
  error: string | null;
}

export interface GiniBar {
  variable: "ethnicity" | "income";
  before: number | null;
  after: number | null;
  delta: number | null;
}

export interface GroupLine {
  label: string;
  stations: number;
  meanWptal: number;
}

export interface DashboardModel {
  scenarioId: string;
  month: string;
  candidates: CandidateLine[];
  giniBars: GiniBar[];
  groupsBefore: Record<string, GroupLine[]>;
  groupsAfter: Record<string, GroupLine[]>;
}

function groupLines(reports: VariableReport[]): Record<string, GroupLine[]> {
  const out: Record<string, GroupLine[]> = {};
  for (const report of reports) {
    out[report.variable] = report.groups.map((g) => ({
      label: g.label,
      stations: g.w,
      meanWptal: g.mean_wptal,
    }));
  }
  return out;
}

function giniOf(reports: VariableReport[], variable: string): number | null {
  const report = reports.find((r) => r.variable === variable);
  return report ? report.gini : null;
}

export function dashboardFromEvaluation(payload: EvaluationPayload): DashboardModel {
  return {
    scenarioId: payload.scenario_id,
    month: payload.month,
    candidates: payload.candidates.map((c) => ({
      candidateId: c.candidate_id,
      location: c.location,
      ok: c.ok,
      ptal: c.ok ? c.ptal ?? null : null,
      demand: c.ok ? c.demand ?? null : null,
      wptal: c.ok ? c.wptal ?? null : null,
      error: c.ok ? null : c.error ?? "unknown error",
    })),
    giniBars: (["ethnicity", "income"] as const).map((variable) => ({
      variable,
      before: giniOf(payload.equity_before, variable),
      after: giniOf(payload.equity_after, variable),
      delta: payload.gini_deltas[variable],
    })),
    groupsBefore: groupLines(payload.equity_before),
    groupsAfter: groupLines(payload.equity_after),
  };
}
