import { describe, expect, it } from "vitest";

import { bannerLabel, bannerLit } from "../src/render.js";
import { ViewModel } from "../src/viewmodel.js";

function vmIn(state: "AreaSafe" | "RedZonePredicted" | "InRedZone", ttc: number | null = null) {
  const vm = new ViewModel("me");
  vm.setConnection("connected");
  vm.applyAdvisory({ id: "me", state, ttc_s: ttc, zones: [] });
  return vm;
}

describe("bannerLabel", () => {
  it("shows the human-readable warning text", () => {
    expect(bannerLabel(vmIn("AreaSafe"))).toBe("Area Safe");
    expect(bannerLabel(vmIn("InRedZone"))).toBe("In Red Zone");
    expect(bannerLabel(vmIn("RedZonePredicted", 1.5))).toBe(
      "Red Zone Predicted (contact in 1.5 s)",
    );
  });

  it("shows disconnected when the link is down", () => {
    const vm = vmIn("InRedZone");
    vm.setConnection("disconnected");
    expect(bannerLabel(vm)).toBe("disconnected");
  });
});

describe("bannerLit", () => {
  it("AreaSafe is never lit", () => {
    const vm = vmIn("AreaSafe");
    for (let t = 0; t < 3_000; t += 100) expect(bannerLit(vm, t)).toBe(false);
  });

  it("InRedZone is solid (lit every frame)", () => {
    const vm = vmIn("InRedZone");
    for (let t = 0; t < 3_000; t += 100) expect(bannerLit(vm, t)).toBe(true);
  });

  it("RedZonePredicted flashes: both phases occur", () => {
    const vm = vmIn("RedZonePredicted", 2.0);
    const phases = new Set<boolean>();
    for (let t = 0; t < 3_000; t += 100) phases.add(bannerLit(vm, t));
    expect(phases).toEqual(new Set([true, false]));
  });
});
