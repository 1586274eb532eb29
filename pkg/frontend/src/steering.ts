// Keyboard-steered avatar. Position integrates at display rate (every
// animation frame) so motion looks smooth, but canonical state messages go
// out at the fixed 1 Hz wire cadence with the speed/heading the peer-side
// prediction expects.

import { headingComponents, toGeo, type GeoPoint, type LocalPoint } from "./geo.js";
import type { StateMessage } from "./protocol.js";

export const WALK_SPEED_MPS = 1.4;
export const PUBLISH_PERIOD_MS = 1_000;

export interface SteeringInput {
  headingDeg: number; // compass degrees [0, 360)
  walking: boolean; // true = walk at 1.4 m/s, false = stop
  healthy: boolean;
}

export class Avatar {
  readonly id: string;
  readonly origin: GeoPoint;
  position: LocalPoint;
  input: SteeringInput = { headingDeg: 0, walking: false, healthy: true };

  constructor(id: string, origin: GeoPoint, start: LocalPoint = { x: 0, y: 0 }) {
    this.id = id;
    this.origin = origin;
    this.position = { ...start };
  }

  get speedMps(): number {
    return this.input.walking ? WALK_SPEED_MPS : 0;
  }

  /** Advance the position by one display-rate step. */
  integrate(dtS: number): void {
    const speed = this.speedMps;
    if (speed === 0 || dtS <= 0) return;
    const dir = headingComponents(this.input.headingDeg);
    this.position = {
      x: this.position.x + dir.x * speed * dtS,
      y: this.position.y + dir.y * speed * dtS,
    };
  }

  /** Snapshot in wire schema at the given session timestamp. */
  stateMessage(tMs: number): StateMessage {
    const geo = toGeo(this.position, this.origin);
    return {
      id: this.id,
      lat: geo.lat,
      lon: geo.lon,
      speed_mps: this.speedMps,
      heading_deg: this.input.headingDeg,
      healthy: this.input.healthy,
      t_ms: tMs,
    };
  }
}

/** Fixed-period scheduler: fires on the 1 Hz grid no matter how irregular
 * the animation frames are, and never double-fires after a stall. */
export class PublishCadence {
  private nextDueMs: number;
  private readonly periodMs: number;

  constructor(startMs: number, periodMs: number = PUBLISH_PERIOD_MS) {
    this.nextDueMs = startMs + periodMs;
    this.periodMs = periodMs;
  }

  /** True if a publish is due at nowMs; advances the schedule when it is. */
  due(nowMs: number): boolean {
    if (nowMs < this.nextDueMs) return false;
    // Skip whole missed periods (tab was backgrounded) instead of bursting.
    const missed = Math.floor((nowMs - this.nextDueMs) / this.periodMs);
    this.nextDueMs += (missed + 1) * this.periodMs;
    return true;
  }
}
