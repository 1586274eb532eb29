"""Wire schema: single-line JSON objects, one per WebSocket text frame.

Two message types travel on the stream: "state" (a pedestrian snapshot,
fanned out to every other client) and "advisory" (a server-computed warning
for one client, only in advisory mode). Field names and the canonical
encoding below are the wire contract.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple


class ProtocolError(ValueError):
    pass


class MalformedMessage(ProtocolError):
    """Not parseable as a single JSON object."""


class UnknownType(ProtocolError):
    """The "type" field is missing or not a known message type."""


class FieldError(ProtocolError):
    """A required field is missing or has the wrong type."""

    def __init__(self, name: str, detail: str = ""):
        super().__init__(f"field {name!r}: {detail or 'missing or wrong type'}")
        self.name = name


@dataclass(frozen=True)
class StateMessage:
    id: str
    lat: float
    lon: float
    speed_mps: float
    heading_deg: float
    healthy: bool
    t_ms: int

    def fields(self) -> Dict[str, Any]:
        """Raw mapping handed to model.validate_state."""
        return {
            "id": self.id,
            "lat": self.lat,
            "lon": self.lon,
            "speed_mps": self.speed_mps,
            "heading_deg": self.heading_deg,
            "healthy": self.healthy,
            "t_ms": self.t_ms,
        }


@dataclass(frozen=True)
class AdvisoryZone:
    lat: float
    lon: float
    radius_m: float
    level_pct: float
    kind: str  # "LivePedestrian" | "Trail"


@dataclass(frozen=True)
class AdvisoryMessage:
    id: str
    state: str  # "AreaSafe" | "RedZonePredicted" | "InRedZone"
    ttc_s: Optional[float] = None
    zones: Tuple[AdvisoryZone, ...] = field(default_factory=tuple)


def _round(v: float, places: int) -> float:
    return round(float(v), places)


def _require_number(obj: Dict[str, Any], name: str) -> float:
    v = obj.get(name)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise FieldError(name, f"expected a finite number, got {v!r}")
    return float(v)


def decode_state(text: str) -> StateMessage:
    """Parse one wire frame into a StateMessage. Unknown fields are ignored;
    range checking happens later in model.validate_state."""
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedMessage(str(exc)) from exc
    if not isinstance(obj, dict):
        raise MalformedMessage("expected a JSON object")
    msg_type = obj.get("type")
    if msg_type != "state":
        raise UnknownType(f"unknown message type {msg_type!r}")

    ped_id = obj.get("id")
    if not isinstance(ped_id, str) or not ped_id:
        raise FieldError("id", "expected a non-empty string")
    healthy = obj.get("healthy")
    if not isinstance(healthy, bool):
        raise FieldError("healthy", f"expected a boolean, got {healthy!r}")
    t_ms = obj.get("t_ms")
    if isinstance(t_ms, bool) or not isinstance(t_ms, int):
        raise FieldError("t_ms", f"expected an integer, got {t_ms!r}")

    return StateMessage(
        id=ped_id,
        lat=_require_number(obj, "lat"),
        lon=_require_number(obj, "lon"),
        speed_mps=_require_number(obj, "speed_mps"),
        heading_deg=_require_number(obj, "heading_deg"),
        healthy=healthy,
        t_ms=t_ms,
    )


def encode_state(m: StateMessage) -> str:
    """Canonical single-line encoding: fixed key order, lat/lon at 7 decimal
    places (about 1 cm), speed and heading at 3."""
    obj = {
        "type": "state",
        "id": m.id,
        "lat": _round(m.lat, 7),
        "lon": _round(m.lon, 7),
        "speed_mps": _round(m.speed_mps, 3),
        "heading_deg": _round(m.heading_deg, 3),
        "healthy": m.healthy,
        "t_ms": m.t_ms,
    }
    return json.dumps(obj, separators=(",", ":"))


def encode_advisory(m: AdvisoryMessage) -> str:
    obj: Dict[str, Any] = {"type": "advisory", "id": m.id, "state": m.state}
    if m.ttc_s is not None:
        obj["ttc_s"] = _round(m.ttc_s, 3)
    obj["zones"] = [
        {
            "lat": _round(z.lat, 7),
            "lon": _round(z.lon, 7),
            "radius_m": _round(z.radius_m, 3),
            "level_pct": _round(z.level_pct, 3),
            "kind": z.kind,
        }
        for z in m.zones
    ]
    return json.dumps(obj, separators=(",", ":"))


def decode_advisory(text: str) -> AdvisoryMessage:
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedMessage(str(exc)) from exc
    if not isinstance(obj, dict):
        raise MalformedMessage("expected a JSON object")
    if obj.get("type") != "advisory":
        raise UnknownType(f"unknown message type {obj.get('type')!r}")
    ped_id = obj.get("id")
    if not isinstance(ped_id, str) or not ped_id:
        raise FieldError("id", "expected a non-empty string")
    state = obj.get("state")
    if state not in ("AreaSafe", "RedZonePredicted", "InRedZone"):
        raise FieldError("state", f"unexpected warning state {state!r}")
    ttc = obj.get("ttc_s")
    if ttc is not None and (isinstance(ttc, bool) or not isinstance(ttc, (int, float))):
        raise FieldError("ttc_s", f"expected a number, got {ttc!r}")
    zones_raw = obj.get("zones")
    if not isinstance(zones_raw, list):
        raise FieldError("zones", "expected a list")
    zones: List[AdvisoryZone] = []
    for z in zones_raw:
        if not isinstance(z, dict):
            raise FieldError("zones", "expected zone objects")
        kind = z.get("kind")
        if kind not in ("LivePedestrian", "Trail"):
            raise FieldError("zones", f"unexpected zone kind {kind!r}")
        zones.append(
            AdvisoryZone(
                lat=_require_number(z, "lat"),
                lon=_require_number(z, "lon"),
                radius_m=_require_number(z, "radius_m"),
                level_pct=_require_number(z, "level_pct"),
                kind=kind,
            )
        )
    return AdvisoryMessage(id=ped_id, state=state, ttc_s=None if ttc is None else float(ttc), zones=tuple(zones))
