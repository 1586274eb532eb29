// Single source of truth for everything the renderer draws. Network and
// input events are funneled through this one object on the main event loop,
// so a frame always sees a consistent snapshot. The banner and the zone set
// come exclusively from advisory messages addressed to this client; the UI
// does no hazard math of its own.

import type {
  AdvisoryMessage,
  AdvisoryZone,
  StateMessage,
  WarningState,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export type AlertPattern = "None" | "Intermittent" | "Continuous";

/** Fixed state→pattern mapping (visual stand-in for device vibration). */
export function alertPattern(state: WarningState): AlertPattern {
  switch (state) {
    case "AreaSafe":
      return "None";
    case "RedZonePredicted":
      return "Intermittent";
    case "InRedZone":
      return "Continuous";
  }
}

export interface Banner {
  state: WarningState;
  ttcS: number | null;
  pattern: AlertPattern;
}

export interface Peer {
  state: StateMessage;
  lastSeenMs: number;
}

/** Peers silent longer than this are dropped from the map (matches the
 * relay's own stale-eviction window). */
export const PEER_TIMEOUT_MS = 5_000;

export function zoneOpacity(zone: AdvisoryZone): number {
  return Math.min(1, Math.max(0, zone.level_pct / 100));
}

export class ViewModel {
  readonly myId: string;
  readonly peers = new Map<string, Peer>();
  zones: AdvisoryZone[] = [];
  banner: Banner = { state: "AreaSafe", ttcS: null, pattern: "None" };
  connection: ConnectionStatus = "connecting";

  constructor(myId: string) {
    this.myId = myId;
  }

  /** Latest-wins per peer id; our own echoes and out-of-order frames are
   * ignored so the map never jumps backwards. */
  applyState(msg: StateMessage, nowMs: number): void {
    if (msg.id === this.myId) return;
    const prev = this.peers.get(msg.id);
    if (prev && msg.t_ms < prev.state.t_ms) return;
    this.peers.set(msg.id, { state: msg, lastSeenMs: nowMs });
  }

  /** Advisories drive banner and zones; ones for other ids are not ours to
   * act on (the relay only sends us our own, but be strict anyway). */
  applyAdvisory(msg: AdvisoryMessage): void {
    if (msg.id !== this.myId) return;
    this.zones = msg.zones;
    this.banner = {
      state: msg.state,
      ttcS: msg.ttc_s,
      pattern: alertPattern(msg.state),
    };
  }

  setConnection(status: ConnectionStatus): void {
    this.connection = status;
    if (status !== "connected") {
      // A dead link means the banner and peer set are stale, not safe.
      this.peers.clear();
      this.zones = [];
      this.banner = { state: "AreaSafe", ttcS: null, pattern: "None" };
    }
  }

  prune(nowMs: number): void {
    for (const [id, peer] of this.peers) {
      if (nowMs - peer.lastSeenMs > PEER_TIMEOUT_MS) this.peers.delete(id);
    }
  }
}
