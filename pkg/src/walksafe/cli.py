"""Command line front end: serve, replay, agents, check."""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import bundled_scenario
from .geodesy import FrameOrigin, to_geo
from .harness import (
    ScenarioScript,
    _derive_motion,
    compress,
    load_scenario,
    run,
    trace_to_geojson,
    warning_sequence,
    write_trace,
)
from .model import EngineParams
from .protocol import StateMessage, encode_state


def _load_params(path: str | None, base: EngineParams | None = None) -> EngineParams:
    params = base or EngineParams()
    if path:
        overrides = json.loads(Path(path).read_text())
        params = replace(params, **overrides)
    return params


def _resolve_scenario(arg: str) -> ScenarioScript:
    p = Path(arg)
    if not p.exists():
        p = bundled_scenario(arg)
    return load_scenario(p)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import Relay, create_app

    params = _load_params(args.params)
    params = replace(params, stale_timeout=args.stale_timeout_s)
    relay = Relay(params=params, advisory=args.advisory)
    app = create_app(relay, tick_hz=args.tick_hz)
    uvicorn.run(app, host="0.0.0.0", port=args.port, log_level="info")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    script = _resolve_scenario(args.scenario)
    if args.params:
        script = replace(script, params=_load_params(args.params, script.params))
    trace = run(script)
    if args.trace:
        write_trace(trace, args.trace)
        print(f"trace written to {args.trace}")
    if args.geojson:
        Path(args.geojson).write_text(json.dumps(trace_to_geojson(trace, script), indent=1))
        print(f"geojson written to {args.geojson}")
    for track in script.tracks:
        seq = compress(warning_sequence(trace, track.id))
        print(f"{script.name}: {track.id}: {' -> '.join(seq)}")
    return 0


async def _drive_agents(script: ScenarioScript, url: str) -> None:
    import websockets

    frame = FrameOrigin(script.origin)
    end = max(wp.t_s for tr in script.tracks for wp in tr.waypoints if tr.waypoints)
    conns = {}
    for track in script.tracks:
        if track.id == script.controlled_id:
            continue
        conns[track.id] = await websockets.connect(url)

    async def drain(ws):
        try:
            async for _ in ws:
                pass
        except Exception:
            pass

    drains = [asyncio.create_task(drain(ws)) for ws in conns.values()]
    t = 0.0
    try:
        while t <= end + 1e-9:
            now = int(round(t * 1000))
            for track in script.tracks:
                if track.id not in conns:
                    continue
                pos, speed, heading = _derive_motion(track, t, script.params.update_period)
                geo = to_geo(pos, frame)
                msg = StateMessage(id=track.id, lat=geo.lat, lon=geo.lon,
                                   speed_mps=speed, heading_deg=heading,
                                   healthy=track.healthy, t_ms=now)
                await conns[track.id].send(encode_state(msg))
            await asyncio.sleep(script.params.update_period)
            t += script.params.update_period
    finally:
        for task in drains:
            task.cancel()
        for ws in conns.values():
            await ws.close()


def cmd_agents(args: argparse.Namespace) -> int:
    script = _resolve_scenario(args.scenario)
    asyncio.run(_drive_agents(script, args.connect))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    """Quick invariant self-tests, handy on a fresh install."""
    import math

    from .geodesy import GeoPoint, haversine_m, to_local
    from .contamination import ContaminationField, ContaminationPuff, prune_expired
    from .model import Circle, EngineParams
    from .geodesy import LocalPoint

    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
        failures += 0 if ok else 1

    frame = FrameOrigin(GeoPoint(40.0, -83.0))
    p = GeoPoint(40.004, -83.007)
    rt = to_geo(to_local(p, frame), frame)
    check("geodesy round-trip", abs(rt.lat - p.lat) < 1e-9 and abs(rt.lon - p.lon) < 1e-9)
    local = to_local(p, frame)
    planar = math.hypot(local.x, local.y)
    check("planar vs haversine within 0.1%",
          abs(planar - haversine_m(frame.origin, p)) / planar < 1e-3)

    params = EngineParams(t_airborne=6.0)
    puff = ContaminationPuff(Circle(LocalPoint(0, 0), params.bubble_radius), 0, 100.0, "x")
    field = ContaminationField((puff,))
    check("puff survives before airborne time", len(prune_expired(field, params, 5999).puffs) == 1)
    check("puff freed at airborne time", len(prune_expired(field, params, 6000).puffs) == 0)

    for name in ("scenario1", "scenario2"):
        script = load_scenario(bundled_scenario(name))
        seq = compress(warning_sequence(run(script), "user"))
        if name == "scenario1":
            check("scenario1 warning sequence",
                  seq == ["AreaSafe", "RedZonePredicted", "InRedZone", "AreaSafe"])
        else:
            check("scenario2 warning sequence",
                  seq == ["AreaSafe", "RedZonePredicted", "AreaSafe"])
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walksafe")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the broadcast relay server")
    serve.add_argument("--port", type=int, default=8700)
    serve.add_argument("--advisory", action="store_true", default=False)
    serve.add_argument("--tick-hz", type=float, default=1.0)
    serve.add_argument("--stale-timeout-s", type=float, default=5.0)
    serve.add_argument("--params", default=None, help="engine parameter overrides (JSON)")
    serve.set_defaults(func=cmd_serve)

    replay = sub.add_parser("replay", help="deterministically replay a scenario")
    replay.add_argument("--scenario", required=True,
                        help="scenario file path or bundled name (scenario1, scenario2)")
    replay.add_argument("--trace", default=None, help="write trace records here")
    replay.add_argument("--geojson", default=None, help="write GeoJSON here")
    replay.add_argument("--params", default=None, help="engine parameter overrides (JSON)")
    replay.set_defaults(func=cmd_replay)

    agents = sub.add_parser("agents", help="drive scripted tracks against a live server")
    agents.add_argument("--scenario", required=True)
    agents.add_argument("--connect", required=True, help="ws://host:port/v1/stream")
    agents.set_defaults(func=cmd_agents)

    check = sub.add_parser("check", help="run invariant self-tests")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
