"""Deterministic scenario replay on a logical clock.

Scenario files script timed waypoint tracks in local meters around a fixed
geographic origin. The harness interpolates positions tick by tick, derives
speed/heading by finite differences, pushes every track through the same
validate/emit/prune/classify pipeline the server uses, and records one trace
event per pedestrian per tick. No wall clock is read anywhere here, so a
given script and parameter set always reproduce the same bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .engine import Engine
from .geodesy import FrameOrigin, GeoPoint, LocalPoint, theta_to_heading, to_geo
from .model import EngineParams, validate_state
from .protocol import StateMessage, decode_advisory, encode_state
from .server import Relay


class ScenarioError(ValueError):
    """Scenario file failed schema or invariant checks."""


@dataclass(frozen=True)
class Waypoint:
    t_s: float
    x: float
    y: float


@dataclass(frozen=True)
class Track:
    id: str
    healthy: bool
    waypoints: Tuple[Waypoint, ...]


@dataclass(frozen=True)
class ScenarioScript:
    name: str
    origin: GeoPoint
    params: EngineParams
    tracks: Tuple[Track, ...]
    controlled_id: Optional[str] = None


@dataclass(frozen=True)
class TraceEvent:
    t_s: float
    id: str
    x: float
    y: float
    warning: str
    ttc_s: Optional[float]
    zones_active: int
    alert: str


@dataclass(frozen=True)
class Trace:
    events: Tuple[TraceEvent, ...]


# -- scenario loading --------------------------------------------------------

_PARAM_KEYS = ("bubble_radius", "t_airborne", "c_start", "horizon",
               "horizon_step", "update_period", "stale_timeout", "legacy_decay")


def _parse_track(raw: object, index: int, controlled_id: Optional[str]) -> Track:
    where = f"tracks[{index}]"
    if not isinstance(raw, dict):
        raise ScenarioError(f"{where}: expected an object")
    track_id = raw.get("id")
    if not isinstance(track_id, str) or not track_id:
        raise ScenarioError(f"{where}: id must be a non-empty string")
    healthy = raw.get("healthy")
    if not isinstance(healthy, bool):
        raise ScenarioError(f"{where} ({track_id}): healthy must be a boolean")

    raw_wps = raw.get("waypoints", [])
    if not isinstance(raw_wps, list):
        raise ScenarioError(f"{where} ({track_id}): waypoints must be a list")
    waypoints: List[Waypoint] = []
    for j, wp in enumerate(raw_wps):
        if not isinstance(wp, dict):
            raise ScenarioError(f"{where} ({track_id}) waypoint {j}: expected an object")
        try:
            t_s, x, y = float(wp["t_s"]), float(wp["x"]), float(wp["y"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"{where} ({track_id}) waypoint {j}: {exc}") from exc
        if not (math.isfinite(t_s) and math.isfinite(x) and math.isfinite(y)):
            raise ScenarioError(f"{where} ({track_id}) waypoint {j}: non-finite value")
        if waypoints and t_s <= waypoints[-1].t_s:
            raise ScenarioError(
                f"{where} ({track_id}) waypoint {j}: times must strictly increase")
        waypoints.append(Waypoint(t_s, x, y))

    if track_id == controlled_id:
        if waypoints:
            raise ScenarioError(f"{where} ({track_id}): controlled track must have no waypoints")
    elif not waypoints:
        raise ScenarioError(f"{where} ({track_id}): at least one waypoint required")
    return Track(id=track_id, healthy=healthy, waypoints=tuple(waypoints))


def parse_scenario(obj: dict, name_hint: str = "scenario") -> ScenarioScript:
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    name = obj.get("name") or name_hint
    origin_raw = obj.get("origin")
    if not isinstance(origin_raw, dict):
        raise ScenarioError("origin must be an object with lat/lon")
    try:
        origin = GeoPoint(float(origin_raw["lat"]), float(origin_raw["lon"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"origin: {exc}") from exc

    overrides = obj.get("params", {})
    if not isinstance(overrides, dict):
        raise ScenarioError("params must be an object")
    unknown = set(overrides) - set(_PARAM_KEYS)
    if unknown:
        raise ScenarioError(f"unknown params: {sorted(unknown)}")
    try:
        params = replace(EngineParams(), **overrides)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"params: {exc}") from exc

    controlled_id = obj.get("controlled_id")
    if controlled_id is not None and (not isinstance(controlled_id, str) or not controlled_id):
        raise ScenarioError("controlled_id must be a non-empty string")

    raw_tracks = obj.get("tracks")
    if not isinstance(raw_tracks, list) or not raw_tracks:
        raise ScenarioError("at least one track required")
    tracks = tuple(_parse_track(t, i, controlled_id) for i, t in enumerate(raw_tracks))
    ids = [t.id for t in tracks]
    if len(set(ids)) != len(ids):
        raise ScenarioError("track ids must be unique")
    return ScenarioScript(name=name, origin=origin, params=params,
                          tracks=tracks, controlled_id=controlled_id)


def load_scenario(path: Union[str, Path]) -> ScenarioScript:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path.name}: {exc}") from exc
    return parse_scenario(obj, name_hint=path.stem.replace(".scenario", ""))


# -- kinematics ---------------------------------------------------------------

def track_position(track: Track, t: float) -> LocalPoint:
    """Linear interpolation between waypoints, clamped at both ends."""
    wps = track.waypoints
    if t <= wps[0].t_s:
        return LocalPoint(wps[0].x, wps[0].y)
    for a, b in zip(wps, wps[1:]):
        if t <= b.t_s:
            frac = (t - a.t_s) / (b.t_s - a.t_s)
            return LocalPoint(a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y))
    return LocalPoint(wps[-1].x, wps[-1].y)


def _derive_motion(track: Track, t: float, dt: float) -> Tuple[LocalPoint, float, float]:
    """Position plus backward-difference speed (m/s) and compass heading."""
    pos = track_position(track, t)
    prev = track_position(track, t - dt)
    vx = (pos.x - prev.x) / dt
    vy = (pos.y - prev.y) / dt
    speed = math.hypot(vx, vy)
    if speed < 1e-12:
        return pos, 0.0, 0.0
    heading = theta_to_heading(math.atan2(vy, vx))
    return pos, speed, heading


# -- simulation ---------------------------------------------------------------

class Simulation:
    """Single-threaded deterministic tick loop over a scenario script."""

    def __init__(self, script: ScenarioScript, record_puffs: bool = False):
        self.script = script
        self.params = script.params
        self.frame = FrameOrigin(script.origin)
        self.engine = Engine(self.params)
        self.t = 0.0
        self.events: List[TraceEvent] = []
        self.record_puffs = record_puffs
        self.puff_snapshots: List[Tuple[float, Tuple]] = []  # (t_s, field.puffs)
        self._stamps: Dict[str, int] = {}

    @property
    def end_time(self) -> float:
        return max(wp.t_s for tr in self.script.tracks for wp in tr.waypoints)

    def step(self) -> List[TraceEvent]:
        """Advance one tick: interpolate, validate, run the engine, record."""
        t = self.t
        now = int(round(t * 1000))
        states = []
        for track in self.script.tracks:
            if not track.waypoints:
                continue
            pos, speed, heading = _derive_motion(track, t, self.params.update_period)
            geo = to_geo(pos, self.frame)
            raw = {
                "id": track.id,
                "lat": geo.lat,
                "lon": geo.lon,
                "speed_mps": speed,
                "heading_deg": heading,
                "healthy": track.healthy,
                "t_ms": now,
            }
            state = validate_state(raw, self.frame, self._stamps.get(track.id))
            self._stamps[track.id] = state.stamp
            states.append(state)

        results = self.engine.step(states, now)
        if self.record_puffs:
            self.puff_snapshots.append((t, self.engine.field.puffs))

        tick_events = []
        for state in sorted(states, key=lambda s: s.id):
            r = results[state.id]
            tick_events.append(TraceEvent(
                t_s=t,
                id=state.id,
                x=state.position.x,
                y=state.position.y,
                warning=r.warning.level.value,
                ttc_s=r.warning.time_to_contact,
                zones_active=r.zones_active,
                alert=r.alert.value,
            ))
        self.events.extend(tick_events)
        self.t = t + self.params.update_period
        return tick_events


def run(script: ScenarioScript) -> Trace:
    """Replay a script to its last waypoint time. Pure in (script, params)."""
    if script.controlled_id is not None:
        raise ScenarioError("cannot replay a script with a controlled track")
    sim = Simulation(script)
    end = sim.end_time
    while sim.t <= end + 1e-9:
        sim.step()
    return Trace(tuple(sim.events))


# -- trace serialization -------------------------------------------------------

def trace_lines(trace: Trace) -> List[str]:
    """Newline-delimited records with fixed field order; byte-stable."""
    lines = []
    for e in trace.events:
        obj = {
            "t_s": round(e.t_s, 3),
            "id": e.id,
            "x": round(e.x, 3),
            "y": round(e.y, 3),
            "warning": e.warning,
            "ttc_s": None if e.ttc_s is None else round(e.ttc_s, 3),
            "zones_active": e.zones_active,
            "alert": e.alert,
        }
        lines.append(json.dumps(obj, separators=(",", ":")))
    return lines


def write_trace(trace: Trace, path: Union[str, Path]) -> None:
    Path(path).write_text("\n".join(trace_lines(trace)) + "\n")


def warning_sequence(trace: Trace, ped_id: str) -> List[str]:
    """Per-tick warnings for one pedestrian, in time order."""
    return [e.warning for e in trace.events if e.id == ped_id]


def compress(seq: Sequence[str]) -> List[str]:
    """Collapse consecutive repeats: the state-machine view of a sequence."""
    out: List[str] = []
    for s in seq:
        if not out or out[-1] != s:
            out.append(s)
    return out


# -- GeoJSON export -------------------------------------------------------------

def _circle_ring(center: LocalPoint, radius: float, frame: FrameOrigin, segments: int = 32) -> List[List[float]]:
    ring = []
    for k in range(segments + 1):
        a = 2.0 * math.pi * (k % segments) / segments
        geo = to_geo(LocalPoint(center.x + radius * math.cos(a),
                                center.y + radius * math.sin(a)), frame)
        ring.append([round(geo.lon, 7), round(geo.lat, 7)])
    return ring


def trace_to_geojson(trace: Trace, script: ScenarioScript) -> dict:
    """Inspectable FeatureCollection: per-pedestrian paths, per-tick puff
    polygons with their contamination level, and warning-transition points."""
    frame = FrameOrigin(script.origin)
    features: List[dict] = []

    by_id: Dict[str, List[TraceEvent]] = {}
    for e in trace.events:
        by_id.setdefault(e.id, []).append(e)

    for ped_id, events in by_id.items():
        coords = []
        for e in events:
            geo = to_geo(LocalPoint(e.x, e.y), frame)
            coords.append([round(geo.lon, 7), round(geo.lat, 7)])
        track = next((t for t in script.tracks if t.id == ped_id), None)
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": coords},
            "properties": {
                "id": ped_id,
                "kind": "path",
                "healthy": track.healthy if track else None,
            },
        })

    if trace.events:
        from .contamination import contamination_level

        sim = Simulation(script, record_puffs=True)
        end = sim.end_time
        while sim.t <= end + 1e-9:
            sim.step()
        for t_s, puffs in sim.puff_snapshots:
            now = int(round(t_s * 1000))
            for puff in puffs:
                level = contamination_level(puff, script.params, now)
                if level <= 0:
                    continue
                features.append({
                    "type": "Feature",
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [_circle_ring(puff.area.center, puff.area.radius, frame)],
                    },
                    "properties": {
                        "kind": "puff",
                        "t_s": round(t_s, 3),
                        "emitter": puff.emitter,
                        "level_pct": round(level, 3),
                    },
                })

    for ped_id, events in by_id.items():
        for prev, cur in zip(events, events[1:]):
            if prev.warning == cur.warning:
                continue
            geo = to_geo(LocalPoint(cur.x, cur.y), frame)
            features.append({
                "type": "Feature",
                "geometry": {"type": "Point",
                             "coordinates": [round(geo.lon, 7), round(geo.lat, 7)]},
                "properties": {
                    "kind": "warning_transition",
                    "id": ped_id,
                    "t_s": round(cur.t_s, 3),
                    "from": prev.warning,
                    "to": cur.warning,
                },
            })

    return {"type": "FeatureCollection", "features": features}


# -- live-vs-replay equivalence -------------------------------------------------

def replay_through_relay(script: ScenarioScript) -> Dict[str, List[str]]:
    """Drive the script through the real relay (in-process transport,
    advisory mode) and collect each pedestrian's advisory state sequence."""
    if script.controlled_id is not None:
        raise ScenarioError("cannot replay a script with a controlled track")
    relay = Relay(params=script.params, frame=FrameOrigin(script.origin), advisory=True)
    inboxes: Dict[str, List[str]] = {}
    sessions = {}
    for track in script.tracks:
        inboxes[track.id] = []
        sessions[track.id] = relay.attach(inboxes[track.id].append)

    end = max(wp.t_s for tr in script.tracks for wp in tr.waypoints)
    sequences: Dict[str, List[str]] = {t.id: [] for t in script.tracks}
    t = 0.0
    while t <= end + 1e-9:
        now = int(round(t * 1000))
        for track in script.tracks:
            pos, speed, heading = _derive_motion(track, t, script.params.update_period)
            geo = to_geo(pos, FrameOrigin(script.origin))
            msg = StateMessage(id=track.id, lat=geo.lat, lon=geo.lon,
                               speed_mps=speed, heading_deg=heading,
                               healthy=track.healthy, t_ms=now)
            relay.handle_text(sessions[track.id], encode_state(msg), now=now)
        relay.tick(now)
        for track in script.tracks:
            advisories = [decode_advisory(m) for m in inboxes[track.id]
                          if '"type":"advisory"' in m]
            if advisories:
                sequences[track.id].append(advisories[-1].state)
            inboxes[track.id].clear()
        t += script.params.update_period
    return sequences
