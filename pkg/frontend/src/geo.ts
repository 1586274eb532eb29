// Equirectangular projection about a fixed origin, matching the relay's
// session frame: x east, y north, in meters. Used only for drawing and for
// turning the steered avatar's local position back into wire lat/lon —
// never for hazard decisions, which stay server-side.

export const EARTH_RADIUS_M = 6_371_000;

export interface GeoPoint {
  lat: number;
  lon: number;
}

export interface LocalPoint {
  x: number;
  y: number;
}

const DEG = Math.PI / 180;

export function toLocal(p: GeoPoint, origin: GeoPoint): LocalPoint {
  const cosLat = Math.cos(origin.lat * DEG);
  return {
    x: (p.lon - origin.lon) * DEG * EARTH_RADIUS_M * cosLat,
    y: (p.lat - origin.lat) * DEG * EARTH_RADIUS_M,
  };
}

export function toGeo(p: LocalPoint, origin: GeoPoint): GeoPoint {
  const cosLat = Math.cos(origin.lat * DEG);
  return {
    lat: origin.lat + p.y / EARTH_RADIUS_M / DEG,
    lon: origin.lon + p.x / (EARTH_RADIUS_M * cosLat) / DEG,
  };
}

/** East/north unit components of a compass heading (0 = north, 90 = east). */
export function headingComponents(headingDeg: number): LocalPoint {
  const h = headingDeg * DEG;
  return { x: Math.sin(h), y: Math.cos(h) };
}
