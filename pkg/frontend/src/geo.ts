/** Linear lon/lat -> viewport projection for the SVG map (city scale, no
 * tile dependency, so everything renders hermetically). */

export interface Viewport {
  width: number;
  height: number;
  bbox: [number, number, number, number]; // min lon, min lat, max lon, max lat
  pad: number;
}

export function project(viewport: Viewport, lon: number, lat: number): [number, number] {
  const [minLon, minLat, maxLon, maxLat] = viewport.bbox;
  const spanLon = maxLon - minLon || 1e-9;
  const spanLat = maxLat - minLat || 1e-9;
  const w = viewport.width - 2 * viewport.pad;
  const h = viewport.height - 2 * viewport.pad;
  const x = viewport.pad + ((lon - minLon) / spanLon) * w;
  // screen y grows downward
  const y = viewport.pad + (1 - (lat - minLat) / spanLat) * h;
  return [x, y];
}

export function unproject(viewport: Viewport, x: number, y: number): [number, number] {
  const [minLon, minLat, maxLon, maxLat] = viewport.bbox;
  const spanLon = maxLon - minLon || 1e-9;
  const spanLat = maxLat - minLat || 1e-9;
  const w = viewport.width - 2 * viewport.pad;
  const h = viewport.height - 2 * viewport.pad;
  const lon = minLon + ((x - viewport.pad) / w) * spanLon;
  const lat = minLat + (1 - (y - viewport.pad) / h) * spanLat;
  return [lon, lat];
}
