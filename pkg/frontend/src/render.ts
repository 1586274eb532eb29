// Canvas renderer: flat local-meters plane, avatar-centered. Green bubbles
// for healthy peers, red for unhealthy, red zone circles with opacity
// level_pct/100 (trails fade out as they decay), and the warning banner —
// flashing for an intermittent alert, solid red for a continuous one.

import { toLocal, type GeoPoint, type LocalPoint } from "./geo.js";
import type { Avatar } from "./steering.js";
import type { ViewModel } from "./viewmodel.js";

export const BUBBLE_RADIUS_M = 9.144;
export const PX_PER_M = 6;
const FLASH_PERIOD_MS = 600;

const BANNER_TEXT = {
  AreaSafe: "Area Safe",
  RedZonePredicted: "Red Zone Predicted",
  InRedZone: "In Red Zone",
} as const;

export function bannerLabel(vm: ViewModel): string {
  if (vm.connection !== "connected") return "disconnected";
  const ttc = vm.banner.ttcS;
  const base = BANNER_TEXT[vm.banner.state];
  return ttc === null ? base : `${base} (contact in ${ttc.toFixed(1)} s)`;
}

/** Whether the banner background should be lit this frame. */
export function bannerLit(vm: ViewModel, nowMs: number): boolean {
  switch (vm.banner.pattern) {
    case "None":
      return false;
    case "Continuous":
      return true;
    case "Intermittent":
      return Math.floor(nowMs / FLASH_PERIOD_MS) % 2 === 0;
  }
}

export class Renderer {
  private readonly ctx: CanvasRenderingContext2D;
  private readonly canvas: HTMLCanvasElement;
  private readonly banner: HTMLElement;
  private readonly origin: GeoPoint;

  constructor(canvas: HTMLCanvasElement, banner: HTMLElement, origin: GeoPoint) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
    this.canvas = canvas;
    this.banner = banner;
    this.origin = origin;
  }

  draw(vm: ViewModel, avatar: Avatar, nowMs: number): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    const center = avatar.position;
    const toPx = (p: LocalPoint): [number, number] => [
      canvas.width / 2 + (p.x - center.x) * PX_PER_M,
      canvas.height / 2 - (p.y - center.y) * PX_PER_M,
    ];

    this.drawGrid(center, toPx);

    // Red zones underneath everything else so bubbles stay readable.
    for (const zone of vm.zones) {
      const local = toLocal({ lat: zone.lat, lon: zone.lon }, this.origin);
      const alpha = Math.min(1, Math.max(0, zone.level_pct / 100));
      this.circle(toPx(local), zone.radius_m * PX_PER_M,
        `rgba(220, 50, 47, ${(0.45 * alpha).toFixed(3)})`,
        `rgba(220, 50, 47, ${alpha.toFixed(3)})`);
    }

    for (const peer of vm.peers.values()) {
      const s = peer.state;
      const local = toLocal({ lat: s.lat, lon: s.lon }, this.origin);
      const color = s.healthy ? "80, 200, 120" : "220, 50, 47";
      this.circle(toPx(local), BUBBLE_RADIUS_M * PX_PER_M,
        `rgba(${color}, 0.15)`, `rgba(${color}, 0.9)`);
      this.dot(toPx(local), `rgb(${color})`, s.id);
    }

    const avatarColor = avatar.input.healthy ? "80, 200, 120" : "220, 50, 47";
    this.circle(toPx(avatar.position), BUBBLE_RADIUS_M * PX_PER_M,
      `rgba(${avatarColor}, 0.20)`, `rgba(${avatarColor}, 1)`);
    this.avatarMarker(toPx(avatar.position), avatar.input.headingDeg,
      `rgb(${avatarColor})`);

    this.drawBanner(vm, nowMs);
  }

  private drawBanner(vm: ViewModel, nowMs: number): void {
    this.banner.textContent = bannerLabel(vm);
    if (vm.connection !== "connected") {
      this.banner.className = "banner disconnected";
    } else if (bannerLit(vm, nowMs)) {
      this.banner.className = "banner alert";
    } else {
      this.banner.className = "banner";
    }
  }

  private drawGrid(center: LocalPoint, toPx: (p: LocalPoint) => [number, number]): void {
    const { ctx, canvas } = this;
    const stepM = 10;
    const spanM = Math.max(canvas.width, canvas.height) / PX_PER_M;
    ctx.strokeStyle = "rgba(255, 255, 255, 0.06)";
    ctx.lineWidth = 1;
    const x0 = Math.floor((center.x - spanM) / stepM) * stepM;
    const y0 = Math.floor((center.y - spanM) / stepM) * stepM;
    for (let x = x0; x <= center.x + spanM; x += stepM) {
      const [px] = toPx({ x, y: center.y });
      ctx.beginPath();
      ctx.moveTo(px, 0);
      ctx.lineTo(px, canvas.height);
      ctx.stroke();
    }
    for (let y = y0; y <= center.y + spanM; y += stepM) {
      const [, py] = toPx({ x: center.x, y });
      ctx.beginPath();
      ctx.moveTo(0, py);
      ctx.lineTo(canvas.width, py);
      ctx.stroke();
    }
  }

  private circle([px, py]: [number, number], rPx: number, fill: string, stroke: string): void {
    const { ctx } = this;
    ctx.beginPath();
    ctx.arc(px, py, rPx, 0, 2 * Math.PI);
    ctx.fillStyle = fill;
    ctx.fill();
    ctx.strokeStyle = stroke;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }

  private dot([px, py]: [number, number], color: string, label: string): void {
    const { ctx } = this;
    ctx.beginPath();
    ctx.arc(px, py, 4, 0, 2 * Math.PI);
    ctx.fillStyle = color;
    ctx.fill();
    ctx.fillStyle = "rgba(255, 255, 255, 0.8)";
    ctx.font = "12px sans-serif";
    ctx.fillText(label, px + 8, py - 8);
  }

  private avatarMarker([px, py]: [number, number], headingDeg: number, color: string): void {
    const { ctx } = this;
    const h = (headingDeg * Math.PI) / 180;
    // Triangle nose points along the compass heading (screen y is south).
    const nose: [number, number] = [px + 10 * Math.sin(h), py - 10 * Math.cos(h)];
    const left: [number, number] = [px + 6 * Math.sin(h + 2.5), py - 6 * Math.cos(h + 2.5)];
    const right: [number, number] = [px + 6 * Math.sin(h - 2.5), py - 6 * Math.cos(h - 2.5)];
    ctx.beginPath();
    ctx.moveTo(...nose);
    ctx.lineTo(...left);
    ctx.lineTo(...right);
    ctx.closePath();
    ctx.fillStyle = color;
    ctx.fill();
  }
}
