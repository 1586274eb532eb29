// Wire schema shared with the relay: one single-line JSON object per
// WebSocket text frame. Two message types travel on /v1/stream: "state"
// (pedestrian snapshots, fanned out to every other client) and "advisory"
// (server-computed warning for this client, advisory mode only). This module
// is the only place wire JSON is read or written.

export interface StateMessage {
  id: string;
  lat: number;
  lon: number;
  speed_mps: number;
  heading_deg: number;
  healthy: boolean;
  t_ms: number;
}

export type WarningState = "AreaSafe" | "RedZonePredicted" | "InRedZone";
export type ZoneKind = "LivePedestrian" | "Trail";

export interface AdvisoryZone {
  lat: number;
  lon: number;
  radius_m: number;
  level_pct: number;
  kind: ZoneKind;
}

export interface AdvisoryMessage {
  id: string;
  state: WarningState;
  ttc_s: number | null;
  zones: AdvisoryZone[];
}

export type StreamMessage =
  | { kind: "state"; state: StateMessage }
  | { kind: "advisory"; advisory: AdvisoryMessage };

export class ProtocolError extends Error {}

const WARNING_STATES: ReadonlySet<string> = new Set([
  "AreaSafe",
  "RedZonePredicted",
  "InRedZone",
]);
const ZONE_KINDS: ReadonlySet<string> = new Set(["LivePedestrian", "Trail"]);

function finiteNumber(obj: Record<string, unknown>, name: string): number {
  const v = obj[name];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`field '${name}': expected a finite number, got ${JSON.stringify(v)}`);
  }
  return v;
}

function nonEmptyString(obj: Record<string, unknown>, name: string): string {
  const v = obj[name];
  if (typeof v !== "string" || v.length === 0) {
    throw new ProtocolError(`field '${name}': expected a non-empty string`);
  }
  return v;
}

function parseObject(text: string): Record<string, unknown> {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (exc) {
    throw new ProtocolError(`not JSON: ${String(exc)}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolError("expected a JSON object");
  }
  return obj as Record<string, unknown>;
}

function decodeStateObject(obj: Record<string, unknown>): StateMessage {
  const healthy = obj.healthy;
  if (typeof healthy !== "boolean") {
    throw new ProtocolError("field 'healthy': expected a boolean");
  }
  const t_ms = obj.t_ms;
  if (typeof t_ms !== "number" || !Number.isInteger(t_ms)) {
    throw new ProtocolError("field 't_ms': expected an integer");
  }
  return {
    id: nonEmptyString(obj, "id"),
    lat: finiteNumber(obj, "lat"),
    lon: finiteNumber(obj, "lon"),
    speed_mps: finiteNumber(obj, "speed_mps"),
    heading_deg: finiteNumber(obj, "heading_deg"),
    healthy,
    t_ms,
  };
}

function decodeAdvisoryObject(obj: Record<string, unknown>): AdvisoryMessage {
  const state = obj.state;
  if (typeof state !== "string" || !WARNING_STATES.has(state)) {
    throw new ProtocolError(`field 'state': unexpected warning state ${JSON.stringify(state)}`);
  }
  const ttc = obj.ttc_s;
  if (ttc !== undefined && ttc !== null && typeof ttc !== "number") {
    throw new ProtocolError("field 'ttc_s': expected a number");
  }
  const zonesRaw = obj.zones;
  if (!Array.isArray(zonesRaw)) {
    throw new ProtocolError("field 'zones': expected a list");
  }
  const zones: AdvisoryZone[] = zonesRaw.map((z) => {
    if (typeof z !== "object" || z === null) {
      throw new ProtocolError("field 'zones': expected zone objects");
    }
    const zone = z as Record<string, unknown>;
    const kind = zone.kind;
    if (typeof kind !== "string" || !ZONE_KINDS.has(kind)) {
      throw new ProtocolError(`field 'zones': unexpected zone kind ${JSON.stringify(kind)}`);
    }
    return {
      lat: finiteNumber(zone, "lat"),
      lon: finiteNumber(zone, "lon"),
      radius_m: finiteNumber(zone, "radius_m"),
      level_pct: finiteNumber(zone, "level_pct"),
      kind: kind as ZoneKind,
    };
  });
  return {
    id: nonEmptyString(obj, "id"),
    state: state as WarningState,
    ttc_s: ttc === undefined || ttc === null ? null : ttc,
    zones,
  };
}

/** Parse one inbound frame; the type field routes between message kinds. */
export function decodeMessage(text: string): StreamMessage {
  const obj = parseObject(text);
  switch (obj.type) {
    case "state":
      return { kind: "state", state: decodeStateObject(obj) };
    case "advisory":
      return { kind: "advisory", advisory: decodeAdvisoryObject(obj) };
    default:
      throw new ProtocolError(`unknown message type ${JSON.stringify(obj.type)}`);
  }
}

function roundTo(v: number, places: number): number {
  const scale = 10 ** places;
  return Math.round(v * scale) / scale;
}

/** Canonical single-line encoding: fixed key order, lat/lon at 7 decimal
 * places (about 1 cm), speed and heading at 3. Mirrors the relay's own
 * canonical form so rebroadcast frames look identical to sent ones. */
export function encodeState(m: StateMessage): string {
  return JSON.stringify({
    type: "state",
    id: m.id,
    lat: roundTo(m.lat, 7),
    lon: roundTo(m.lon, 7),
    speed_mps: roundTo(m.speed_mps, 3),
    heading_deg: roundTo(m.heading_deg, 3),
    healthy: m.healthy,
    t_ms: m.t_ms,
  });
}
