/** wPTAL color ramp driven by the quantile breaks the service returns.
 *
 * Bin i covers values below breaks[i]; values at or above the last break take
 * the top color. The breaks come from the /api/stations payload so the legend
 * always matches the service's own quantiles.
 */

export const RAMP_COLORS = ["#2c7bb6", "#abd9e9", "#ffffbf", "#fdae61", "#d7191c"];

export function binIndex(value: number, breaks: number[]): number {
  let i = 0;
  while (i < breaks.length && value >= breaks[i]) {
    i += 1;
  }
  return i;
}

export function colorForWptal(value: number | null, breaks: number[]): string {
  if (value === null) {
    return "#999999"; // unscored (existing) stations
  }
  if (breaks.length === 0) {
    return RAMP_COLORS[0];
  }
  return RAMP_COLORS[Math.min(binIndex(value, breaks), RAMP_COLORS.length - 1)];
}

export interface LegendEntry {
  color: string;
  label: string;
}

export function legendEntries(breaks: number[]): LegendEntry[] {
  if (breaks.length === 0) {
    return [{ color: RAMP_COLORS[0], label: "no scored stations" }];
  }
  const entries: LegendEntry[] = [];
  for (let i = 0; i <= breaks.length; i += 1) {
    const lo = i === 0 ? null : breaks[i - 1];
    const hi = i === breaks.length ? null : breaks[i];
    const label =
      lo === null ? `< ${hi}` : hi === null ? `>= ${lo}` : `${lo} - ${hi}`;
    entries.push({ color: RAMP_COLORS[Math.min(i, RAMP_COLORS.length - 1)], label });
  }
  return entries;
}
