/** Payload shapes of the planner service API (schema_version "1").
 *
 * Coordinates are [lon, lat] pairs throughout, matching the service.
 */

export type LonLat = [number, number];

export interface SnapshotSummary {
  schema_version: string;
  counts: {
    stations: number;
    entrances: number;
    schedules: number;
    zones: number;
    pois: number;
    nodes: number;
    edges: number;
  };
  bbox: [number, number, number, number]; // min lon, min lat, max lon, max lat
}

export interface StationRow {
  station_id: string;
  location: LonLat;
  status: "existing" | "cold_start" | "candidate";
  open_month: string | null;
  ptal: number | null;
  demand: number | null;
  wptal: number | null;
  n_entrances: number | null;
}

export interface StationsPayload {
  schema_version: string;
  month: string;
  stations: StationRow[];
  wptal_breaks: number[];
}

export interface ZoneRow {
  zone_id: string;
  polygon: LonLat[];
  pop_white: number;
  pop_black: number;
  pop_asian: number;
  pop_hispanic: number;
  median_income: number;
  pop_density: number;
}

export interface ZonesPayload {
  schema_version: string;
  zones: ZoneRow[];
}

export interface ScenarioCreated {
  schema_version: string;
  scenario_id: string;
  month: string;
}

export interface ScenarioState {
  schema_version: string;
  scenario_id: string;
  month: string;
  added: LonLat[];
  removed_station_ids: string[];
}

export interface CandidateResult {
  candidate_id: string;
  location: LonLat;
  ok: boolean;
  ptal?: number;
  demand?: number;
  wptal?: number;
  error?: string;
}

export interface GroupRow {
  label: string;
  w: number;
  mean_wptal: number;
}

export interface VariableReport {
  variable: "ethnicity" | "income";
  groups: GroupRow[];
  W: number;
  mu: number;
  gini: number | null;
}

export interface EvaluationPayload {
  schema_version: string;
  scenario_id: string;
  month: string;
  candidates: CandidateResult[];
  removed_station_ids: string[];
  equity_before: VariableReport[];
  equity_after: VariableReport[];
  gini_deltas: { ethnicity: number | null; income: number | null };
}

export interface RecommendationRow {
  rank: number;
  candidate_id: string;
  lon: number;
  lat: number;
  demand: number;
  ptal: number;
  wptal: number;
}

export interface RecommendPayload {
  schema_version: string;
  month: string;
  recommendations: RecommendationRow[];
}
