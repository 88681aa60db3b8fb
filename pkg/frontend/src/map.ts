/** Pure SVG element descriptors for the map layers. Building plain data here
 * (rather than DOM nodes) keeps rendering logic testable without a browser. */

import { project, type Viewport } from "./geo.js";
import { colorForWptal } from "./ramp.js";
import type { LonLat, StationRow, ZoneRow } from "./types.js";

export interface SvgPolygon {
  kind: "polygon";
  id: string;
  points: string;
  fill: string;
  title: string;
}

export interface SvgCircle {
  kind: "circle";
  id: string;
  cx: number;
  cy: number;
  r: number;
  fill: string;
  stroke: string;
  title: string;
}

export type SvgElement = SvgPolygon | SvgCircle;

const ZONE_SHADES = ["#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6"];

export function zoneShade(zone: ZoneRow, grouping: "ethnicity" | "income", zones: ZoneRow[]): string {
  if (grouping === "income") {
    const incomes = zones.map((z) => z.median_income).sort((a, b) => a - b);
    const rank = incomes.indexOf(zone.median_income) / Math.max(incomes.length - 1, 1);
    return ZONE_SHADES[Math.min(Math.floor(rank * ZONE_SHADES.length), ZONE_SHADES.length - 1)];
  }
  const counts: [string, number][] = [
    ["#c6dbef", zone.pop_white],
    ["#fdd0a2", zone.pop_black],
    ["#c7e9c0", zone.pop_asian],
    ["#dadaeb", zone.pop_hispanic],
  ];
  counts.sort((a, b) => b[1] - a[1]);
  return counts[0][0];
}

export function zoneLayer(
  zones: ZoneRow[],
  grouping: "ethnicity" | "income",
  viewport: Viewport,
): SvgPolygon[] {
  return zones.map((zone) => ({
    kind: "polygon",
    id: `zone-${zone.zone_id}`,
    points: zone.polygon
      .map(([lon, lat]) => project(viewport, lon, lat).map((v) => v.toFixed(1)).join(","))
      .join(" "),
    fill: zoneShade(zone, grouping, zones),
    title: `${zone.zone_id}: income ${zone.median_income}`,
  }));
}

export function stationLayer(
  stations: StationRow[],
  breaks: number[],
  viewport: Viewport,
): SvgCircle[] {
  return stations.map((station) => {
    const [cx, cy] = project(viewport, station.location[0], station.location[1]);
    return {
      kind: "circle",
      id: `station-${station.station_id}`,
      cx,
      cy,
      r: station.status === "existing" ? 3 : 5,
      fill: colorForWptal(station.wptal, breaks),
      stroke: station.status === "cold_start" ? "#333333" : "none",
      title:
        station.wptal === null
          ? `${station.station_id} (${station.status})`
          : `${station.station_id}: wPTAL ${station.wptal}`,
    };
  });
}

export function pinLayer(pins: LonLat[], viewport: Viewport): SvgCircle[] {
  return pins.map((pin, i) => {
    const [cx, cy] = project(viewport, pin[0], pin[1]);
    return {
      kind: "circle",
      id: `pin-${i}`,
      cx,
      cy,
      r: 7,
      fill: "#ff00aa",
      stroke: "#660044",
      title: `candidate pin ${i}`,
    };
  });
}
