// Entry point: wires the WebSocket client, keyboard steering and the
// animation loop together. Everything funnels through one ViewModel on the
// main event loop; there is no other shared state.
//
// Query parameters:
//   ?url=ws://host:port/v1/stream   relay endpoint (default: same host, :8700)
//   ?id=you                        pedestrian id (default: random)
//   ?lat=40&lon=-83                session origin for the local frame

import { reconnectDelayMs } from "./backoff.js";
import type { GeoPoint } from "./geo.js";
import { decodeMessage, encodeState, ProtocolError } from "./protocol.js";
import { Renderer } from "./render.js";
import { Avatar, PublishCadence, WALK_SPEED_MPS } from "./steering.js";
import { ViewModel } from "./viewmodel.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

const myId = param("id", `web-${Math.random().toString(36).slice(2, 8)}`);
const origin: GeoPoint = {
  lat: Number(param("lat", "40.0")),
  lon: Number(param("lon", "-83.0")),
};
const url = param(
  "url",
  `ws://${window.location.hostname || "localhost"}:8700/v1/stream`,
);

const vm = new ViewModel(myId);
const avatar = new Avatar(myId, origin);
const canvas = document.getElementById("map") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLElement;
const renderer = new Renderer(canvas, banner, origin);

// --- WebSocket with reconnect -----------------------------------------------

let socket: WebSocket | null = null;
let attempt = 0;
const epochMs = Date.now();

function connect(): void {
  vm.setConnection("connecting");
  const ws = new WebSocket(url);
  socket = ws;

  ws.onopen = () => {
    attempt = 0;
    vm.setConnection("connected");
    publish(); // claim our id immediately rather than waiting for the cadence
  };
  ws.onmessage = (ev: MessageEvent) => {
    if (typeof ev.data !== "string") return;
    try {
      const msg = decodeMessage(ev.data);
      if (msg.kind === "state") vm.applyState(msg.state, performance.now());
      else vm.applyAdvisory(msg.advisory);
    } catch (exc) {
      if (!(exc instanceof ProtocolError)) throw exc;
      console.warn("dropped frame:", exc.message);
    }
  };
  ws.onclose = () => {
    if (socket !== ws) return;
    socket = null;
    vm.setConnection("disconnected");
    const delay = reconnectDelayMs(attempt++);
    setTimeout(connect, delay);
  };
  ws.onerror = () => ws.close();
}

function publish(): void {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(encodeState(avatar.stateMessage(Date.now() - epochMs)));
  }
}

// --- keyboard steering --------------------------------------------------------

const HEADING_KEYS: Record<string, number> = {
  ArrowUp: 0, w: 0,
  ArrowRight: 90, d: 90,
  ArrowDown: 180, s: 180,
  ArrowLeft: 270, a: 270,
};

window.addEventListener("keydown", (ev) => {
  const heading = HEADING_KEYS[ev.key];
  if (heading !== undefined) {
    avatar.input = { ...avatar.input, headingDeg: heading, walking: true };
    ev.preventDefault();
  } else if (ev.key === " ") {
    avatar.input = { ...avatar.input, walking: !avatar.input.walking };
    ev.preventDefault();
  } else if (ev.key === "h") {
    avatar.input = { ...avatar.input, healthy: !avatar.input.healthy };
  }
});

// --- frame loop ---------------------------------------------------------------

const cadence = new PublishCadence(performance.now());
let lastFrameMs = performance.now();

function frame(nowMs: number): void {
  const dtS = Math.min(0.25, (nowMs - lastFrameMs) / 1000);
  lastFrameMs = nowMs;
  avatar.integrate(dtS);
  if (cadence.due(nowMs)) publish();
  vm.prune(nowMs);
  renderer.draw(vm, avatar, nowMs);
  requestAnimationFrame(frame);
}

const help = document.getElementById("help");
if (help) {
  help.textContent =
    `id ${myId} — arrows/WASD steer, space stop/go (${WALK_SPEED_MPS} m/s), h toggles health`;
}

connect();
requestAnimationFrame(frame);
