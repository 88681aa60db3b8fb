/** Browser bootstrap: wires the typed client, map layers, and dashboard to
 * the DOM. All metric values render verbatim from service payloads; this file
 * contains wiring only and is exercised manually (the logic modules carry the
 * test coverage). */

import { PlannerClient, fetchTransport } from "./api.js";
import { dashboardFromEvaluation, type DashboardModel } from "./dashboard.js";
import { unproject, type Viewport } from "./geo.js";
import { pinLayer, stationLayer, zoneLayer, type SvgElement } from "./map.js";
import { legendEntries } from "./ramp.js";
import {
  initialState,
  withEvaluation,
  withGrouping,
  withPinAdded,
  withPinRemoved,
  withScenario,
  type UiScenarioState,
} from "./state.js";
import { exportPlanCsv, planRowsFromCandidates } from "./exportPlan.js";
import type { StationsPayload, ZonesPayload } from "./types.js";

const MONTH = new URLSearchParams(window.location.search).get("month") ?? "2025-01";
const client = new PlannerClient(fetchTransport(""));

const mapSvg = document.getElementById("map") as unknown as SVGSVGElement;
const dashboardEl = document.getElementById("dashboard") as HTMLElement;
const legendEl = document.getElementById("legend") as HTMLElement;
const bannerEl = document.getElementById("banner") as HTMLElement;
const exportBtn = document.getElementById("export") as HTMLButtonElement;
const groupingSel = document.getElementById("grouping") as HTMLSelectElement;

let state: UiScenarioState = initialState(MONTH);
let stationsPayload: StationsPayload | null = null;
let zonesPayload: ZonesPayload | null = null;
let viewport: Viewport | null = null;

function showError(message: string): void {
  bannerEl.textContent = message;
  bannerEl.style.display = "block";
  mapSvg.replaceChildren(); // never show stale data next to an error banner
}

function renderSvg(elements: SvgElement[]): void {
  const ns = "http://www.w3.org/2000/svg";
  mapSvg.replaceChildren();
  for (const el of elements) {
    const node =
      el.kind === "polygon"
        ? document.createElementNS(ns, "polygon")
        : document.createElementNS(ns, "circle");
    if (el.kind === "polygon") {
      node.setAttribute("points", el.points);
      node.setAttribute("stroke", "#888");
    } else {
      node.setAttribute("cx", String(el.cx));
      node.setAttribute("cy", String(el.cy));
      node.setAttribute("r", String(el.r));
      node.setAttribute("stroke", el.stroke);
    }
    node.setAttribute("id", el.id);
    node.setAttribute("fill", el.fill);
    const title = document.createElementNS(ns, "title");
    title.textContent = el.title;
    node.appendChild(title);
    mapSvg.appendChild(node);
  }
}

function renderMap(): void {
  if (!stationsPayload || !zonesPayload || !viewport) {
    return;
  }
  renderSvg([
    ...zoneLayer(zonesPayload.zones, state.grouping, viewport),
    ...stationLayer(stationsPayload.stations, stationsPayload.wptal_breaks, viewport),
    ...pinLayer(state.pendingPins, viewport),
  ]);
  legendEl.replaceChildren(
    ...legendEntries(stationsPayload.wptal_breaks).map((entry) => {
      const row = document.createElement("div");
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = entry.color;
      row.append(swatch, ` wPTAL ${entry.label}`);
      return row;
    }),
  );
}

function metric(value: number | null): string {
  return value === null ? "—" : String(value);
}

function renderDashboard(model: DashboardModel | null): void {
  dashboardEl.replaceChildren();
  if (!model) {
    dashboardEl.textContent = "Click the map to place a candidate pin.";
    exportBtn.disabled = true;
    return;
  }
  exportBtn.disabled = planRowsFromCandidates(model.candidates).length === 0;
  for (const bar of model.giniBars) {
    const row = document.createElement("div");
    row.className = "gini-row";
    row.textContent =
      `${bar.variable} Gini: ${metric(bar.before)} -> ${metric(bar.after)}` +
      ` (delta ${metric(bar.delta)})`;
    dashboardEl.appendChild(row);
  }
  for (const cand of model.candidates) {
    const row = document.createElement("div");
    row.className = "candidate-row";
    row.textContent = cand.ok
      ? `${cand.candidateId}: demand ${metric(cand.demand)}, PTAL ${metric(cand.ptal)}, ` +
        `wPTAL ${metric(cand.wptal)}`
      : `${cand.candidateId}: ${cand.error}`;
    const remove = document.createElement("button");
    remove.textContent = "remove";
    remove.addEventListener("click", () => void removePin(cand.location));
    row.appendChild(remove);
    dashboardEl.appendChild(row);
  }
}

async function evaluateAndRender(): Promise<void> {
  if (!state.scenarioId) {
    return;
  }
  const payload = await client.evaluate(state.scenarioId);
  state = withEvaluation(state, payload);
  renderDashboard(dashboardFromEvaluation(payload));
  renderMap();
}

async function addPin(pin: [number, number]): Promise<void> {
  if (!state.scenarioId) {
    return;
  }
  await client.addPin(state.scenarioId, pin);
  state = withPinAdded(state, pin);
  await evaluateAndRender();
}

async function removePin(pin: [number, number]): Promise<void> {
  if (!state.scenarioId) {
    return;
  }
  await client.removePin(state.scenarioId, pin);
  state = withPinRemoved(state, pin);
  await evaluateAndRender();
}

function downloadPlan(): void {
  if (!state.lastEvaluation) {
    return;
  }
  const rows = planRowsFromCandidates(dashboardFromEvaluation(state.lastEvaluation).candidates);
  const blob = new Blob([exportPlanCsv(rows)], { type: "text/csv" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "recommendations.csv";
  link.click();
  URL.revokeObjectURL(link.href);
}

async function boot(): Promise<void> {
  try {
    const summary = await client.summary();
    viewport = { width: 800, height: 600, bbox: summary.bbox, pad: 20 };
    [stationsPayload, zonesPayload] = await Promise.all([
      client.stations(MONTH),
      client.zones(),
    ]);
    const created = await client.createScenario(MONTH);
    state = withScenario(state, created.scenario_id);
    renderMap();
    renderDashboard(null);
  } catch (err) {
    showError(`service unreachable: ${String(err)}`);
    return;
  }
  mapSvg.addEventListener("click", (event) => {
    if (!viewport) {
      return;
    }
    const rect = mapSvg.getBoundingClientRect();
    const pin = unproject(viewport, event.clientX - rect.left, event.clientY - rect.top);
    void addPin([pin[0], pin[1]]);
  });
  groupingSel.addEventListener("change", () => {
    state = withGrouping(state, groupingSel.value as "ethnicity" | "income");
    renderMap();
  });
  exportBtn.addEventListener("click", downloadPlan);
}

void boot();
