import { describe, expect, it } from "vitest";

import type { AdvisoryMessage, StateMessage } from "../src/protocol.js";
import {
  alertPattern,
  PEER_TIMEOUT_MS,
  ViewModel,
  zoneOpacity,
} from "../src/viewmodel.js";

function state(id: string, tMs: number, healthy = true): StateMessage {
  return {
    id,
    lat: 40,
    lon: -83,
    speed_mps: 1.4,
    heading_deg: 90,
    healthy,
    t_ms: tMs,
  };
}

function advisory(id: string, overrides: Partial<AdvisoryMessage> = {}): AdvisoryMessage {
  return { id, state: "AreaSafe", ttc_s: null, zones: [], ...overrides };
}

describe("ViewModel peers", () => {
  it("keeps the latest state per peer id", () => {
    const vm = new ViewModel("me");
    vm.applyState(state("p", 1000), 0);
    vm.applyState(state("p", 2000, false), 10);
    expect(vm.peers.size).toBe(1);
    expect(vm.peers.get("p")!.state.t_ms).toBe(2000);
    expect(vm.peers.get("p")!.state.healthy).toBe(false);
  });

  it("drops out-of-order frames instead of rewinding the map", () => {
    const vm = new ViewModel("me");
    vm.applyState(state("p", 2000), 0);
    vm.applyState(state("p", 1000), 10);
    expect(vm.peers.get("p")!.state.t_ms).toBe(2000);
  });

  it("ignores echoes of our own id", () => {
    const vm = new ViewModel("me");
    vm.applyState(state("me", 1000), 0);
    expect(vm.peers.size).toBe(0);
  });

  it("prunes peers silent beyond the timeout", () => {
    const vm = new ViewModel("me");
    vm.applyState(state("old", 1000), 0);
    vm.applyState(state("fresh", 1000), PEER_TIMEOUT_MS);
    vm.prune(PEER_TIMEOUT_MS + 1);
    expect([...vm.peers.keys()]).toEqual(["fresh"]);
  });
});

describe("ViewModel banner", () => {
  it("tracks only advisories addressed to me", () => {
    const vm = new ViewModel("me");
    vm.applyAdvisory(advisory("someone-else", { state: "InRedZone" }));
    expect(vm.banner.state).toBe("AreaSafe");
    vm.applyAdvisory(advisory("me", { state: "RedZonePredicted", ttc_s: 1.5 }));
    expect(vm.banner.state).toBe("RedZonePredicted");
    expect(vm.banner.ttcS).toBe(1.5);
    expect(vm.banner.pattern).toBe("Intermittent");
  });

  it("replays a recorded advisory log into the exact banner sequence", () => {
    // Scenario-1-style narrative: Safe → Predicted (ttc countdown) → InRed → Safe.
    const log: AdvisoryMessage[] = [
      advisory("me"),
      advisory("me", { state: "RedZonePredicted", ttc_s: 3.0 }),
      advisory("me", { state: "RedZonePredicted", ttc_s: 2.0 }),
      advisory("me", { state: "InRedZone" }),
      advisory("me"),
    ];
    const vm = new ViewModel("me");
    const seen = log.map((m) => {
      vm.applyAdvisory(m);
      return vm.banner.state;
    });
    expect(seen).toEqual([
      "AreaSafe",
      "RedZonePredicted",
      "RedZonePredicted",
      "InRedZone",
      "AreaSafe",
    ]);
    expect(vm.banner.pattern).toBe("None");
  });

  it("zones come from the advisory, latest wins", () => {
    const vm = new ViewModel("me");
    const zone = { lat: 40, lon: -83, radius_m: 9.144, level_pct: 50, kind: "Trail" as const };
    vm.applyAdvisory(advisory("me", { state: "InRedZone", zones: [zone, zone] }));
    expect(vm.zones).toHaveLength(2);
    vm.applyAdvisory(advisory("me"));
    expect(vm.zones).toHaveLength(0);
  });
});

describe("connection status", () => {
  it("disconnect clears stale peers, zones and banner", () => {
    const vm = new ViewModel("me");
    vm.setConnection("connected");
    vm.applyState(state("p", 1000), 0);
    vm.applyAdvisory(advisory("me", { state: "InRedZone" }));
    vm.setConnection("disconnected");
    expect(vm.connection).toBe("disconnected");
    expect(vm.peers.size).toBe(0);
    expect(vm.zones).toHaveLength(0);
    expect(vm.banner.state).toBe("AreaSafe");
  });
});

describe("mappings", () => {
  it("alert pattern per warning state", () => {
    expect(alertPattern("AreaSafe")).toBe("None");
    expect(alertPattern("RedZonePredicted")).toBe("Intermittent");
    expect(alertPattern("InRedZone")).toBe("Continuous");
  });

  it("zone opacity is level_pct/100 clamped to [0, 1]", () => {
    const zone = (level_pct: number) => ({
      lat: 0, lon: 0, radius_m: 1, level_pct, kind: "Trail" as const,
    });
    expect(zoneOpacity(zone(50))).toBeCloseTo(0.5, 12);
    expect(zoneOpacity(zone(100))).toBe(1);
    expect(zoneOpacity(zone(0))).toBe(0);
    expect(zoneOpacity(zone(120))).toBe(1);
    expect(zoneOpacity(zone(-5))).toBe(0);
  });
});
