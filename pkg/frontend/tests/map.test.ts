import { describe, expect, it } from "vitest";

import { project, unproject, type Viewport } from "../src/geo.js";
import { pinLayer, stationLayer, zoneLayer } from "../src/map.js";
import { binIndex, colorForWptal, legendEntries, RAMP_COLORS } from "../src/ramp.js";
import type { StationRow, ZoneRow } from "../src/types.js";

const viewport: Viewport = { width: 800, height: 600, bbox: [0, 0, 0.02, 0.02], pad: 20 };

describe("projection", () => {
  it("project and unproject are inverse", () => {
    for (const [lon, lat] of [[0.001, 0.002], [0.015, 0.019], [0, 0], [0.02, 0.02]] as const) {
      const [x, y] = project(viewport, lon, lat);
      const [lon2, lat2] = unproject(viewport, x, y);
      expect(lon2).toBeCloseTo(lon, 12);
      expect(lat2).toBeCloseTo(lat, 12);
    }
  });

  it("north is up", () => {
    const [, yLow] = project(viewport, 0.01, 0.0);
    const [, yHigh] = project(viewport, 0.01, 0.02);
    expect(yHigh).toBeLessThan(yLow);
  });
});

describe("color ramp", () => {
  const breaks = [1, 2, 3, 4];

  it("bins by quantile breaks", () => {
    expect(binIndex(0.5, breaks)).toBe(0);
    expect(binIndex(1, breaks)).toBe(1); // at a break -> upper bin
    expect(binIndex(2.5, breaks)).toBe(2);
    expect(binIndex(99, breaks)).toBe(4);
  });

  it("unscored stations are gray; zero wptal takes the lowest color", () => {
    expect(colorForWptal(null, breaks)).toBe("#999999");
    expect(colorForWptal(0, breaks)).toBe(RAMP_COLORS[0]);
  });

  it("legend covers breaks + 1 bins", () => {
    expect(legendEntries(breaks)).toHaveLength(5);
    expect(legendEntries([])).toHaveLength(1);
  });
});

describe("map layers", () => {
  const stations: StationRow[] = [
    {
      station_id: "a",
      location: [0.001, 0.001],
      status: "cold_start",
      open_month: "2025-01",
      ptal: 2.0,
      demand: 1.0,
      wptal: 2.0,
      n_entrances: 1,
    },
    {
      station_id: "b",
      location: [0.012, 0.004],
      status: "existing",
      open_month: "2023-01",
      ptal: null,
      demand: null,
      wptal: null,
      n_entrances: null,
    },
  ];
  const zones: ZoneRow[] = [
    {
      zone_id: "z0",
      polygon: [[0, 0], [0.01, 0], [0.01, 0.01], [0, 0.01], [0, 0]],
      pop_white: 10,
      pop_black: 80,
      pop_asian: 5,
      pop_hispanic: 5,
      median_income: 30_000,
      pop_density: 8000,
    },
    {
      zone_id: "z1",
      polygon: [[0.01, 0], [0.02, 0], [0.02, 0.01], [0.01, 0.01], [0.01, 0]],
      pop_white: 90,
      pop_black: 5,
      pop_asian: 3,
      pop_hispanic: 2,
      median_income: 90_000,
      pop_density: 11000,
    },
  ];

  it("station colors come from the service's quantile breaks", () => {
    const breaks = [1, 2, 3, 4];
    const layer = stationLayer(stations, breaks, viewport);
    for (const circle of layer) {
      const row = stations.find((s) => `station-${s.station_id}` === circle.id)!;
      expect(circle.fill).toBe(colorForWptal(row.wptal, breaks));
    }
  });

  it("zero-station snapshot still renders the zone layer", () => {
    expect(stationLayer([], [], viewport)).toEqual([]);
    expect(zoneLayer(zones, "income", viewport)).toHaveLength(2);
  });

  it("income shading is monotone with income rank", () => {
    const [low, high] = zoneLayer(zones, "income", viewport);
    expect(low.fill).not.toBe(high.fill);
  });

  it("ethnicity shading follows the predominant group", () => {
    const [blackMajority, whiteMajority] = zoneLayer(zones, "ethnicity", viewport);
    expect(blackMajority.fill).toBe("#fdd0a2");
    expect(whiteMajority.fill).toBe("#c6dbef");
  });

  it("pins render at projected coordinates", () => {
    const [pin] = pinLayer([[0.01, 0.01]], viewport);
    const [x, y] = project(viewport, 0.01, 0.01);
    expect(pin.cx).toBe(x);
    expect(pin.cy).toBe(y);
  });
});
