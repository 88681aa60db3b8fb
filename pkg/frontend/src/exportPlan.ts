/** Plan export/import in exactly the CLI's recommendations.csv schema, so an
 * exported plan feeds straight back into `equity --plan`. */

import type { CandidateLine } from "./dashboard.js";
import type { RecommendationRow } from "./types.js";

export const PLAN_HEADER = "rank,candidate_id,lon,lat,demand,ptal,wptal";

function fixed6(x: number): string {
  return x.toFixed(6);
}

export function planRowsFromCandidates(candidates: CandidateLine[]): RecommendationRow[] {
  return candidates
    .filter((c) => c.ok && c.ptal !== null && c.demand !== null && c.wptal !== null)
    .map((c, i) => ({
      rank: i + 1,
      candidate_id: c.candidateId,
      lon: c.location[0],
      lat: c.location[1],
      demand: c.demand as number,
      ptal: c.ptal as number,
      wptal: c.wptal as number,
    }));
}

export function exportPlanCsv(rows: RecommendationRow[]): string {
  const lines = [PLAN_HEADER];
  for (const row of rows) {
    lines.push(
      [
        String(row.rank),
        row.candidate_id,
        String(row.lon),
        String(row.lat),
        fixed6(row.demand),
        fixed6(row.ptal),
        fixed6(row.wptal),
      ].join(","),
    );
  }
  return lines.join("\r\n") + "\r\n";
}

export function exportPlanJson(rows: RecommendationRow[]): string {
  return JSON.stringify({ schema_version: "1", recommendations: rows }, null, 2);
}

export function importPlanCsv(text: string): RecommendationRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines[0] !== PLAN_HEADER) {
    throw new Error(`unexpected plan header: ${lines[0]}`);
  }
  return lines.slice(1).map((line) => {
    const parts = line.split(",");
    if (parts.length !== 7) {
      throw new Error(`malformed plan row: ${line}`);
    }
    return {
      rank: Number(parts[0]),
      candidate_id: parts[1],
      lon: Number(parts[2]),
      lat: Number(parts[3]),
      demand: Number(parts[4]),
      ptal: Number(parts[5]),
      wptal: Number(parts[6]),
    };
  });
}
