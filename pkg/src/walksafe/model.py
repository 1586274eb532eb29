"""Pedestrian state, safety bubbles and circle geometry.

Shared vocabulary for the contamination field, the warning classifier and
the server: everything here is an immutable value type plus pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .geodesy import FrameOrigin, GeoPoint, LocalPoint, heading_to_theta, to_local

#: 30 ft bubble: five times the CDC 6 ft floor, padding out GPS noise and wind.
DEFAULT_BUBBLE_RADIUS_M = 9.144
#: Hard floor: never configure a bubble tighter than 6 ft (1.8288 m).
MIN_BUBBLE_RADIUS_M = 1.8288

#: GPS glitches produce absurd velocities; anything faster than this is junk.
SPEED_CAP_MPS = 15.0


class ValidationError(ValueError):
    """A wire state update violated an invariant. ``code`` names which one."""

    code = "Invalid"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class EmptyId(ValidationError):
    code = "EmptyId"


class LatOutOfRange(ValidationError):
    code = "LatOutOfRange"


class LonOutOfRange(ValidationError):
    code = "LonOutOfRange"


class NegativeSpeed(ValidationError):
    code = "NegativeSpeed"


class SpeedExceedsCap(ValidationError):
    code = "SpeedExceedsCap"


class HeadingOutOfRange(ValidationError):
    code = "HeadingOutOfRange"


class NonFiniteField(ValidationError):
    code = "NonFiniteField"


class StaleStamp(ValidationError):
    code = "StaleStamp"


@dataclass(frozen=True)
class Circle:
    center: LocalPoint
    radius: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"circle radius must be positive and finite, got {self.radius}")


@dataclass(frozen=True)
class PedestrianState:
    """One pedestrian's kinematic and health snapshot at a timestamp."""

    id: str
    position: LocalPoint
    geo: GeoPoint
    speed: float  # m/s
    theta: float  # math radians in (-pi, pi]
    healthy: bool
    stamp: int  # ms since session epoch


@dataclass(frozen=True)
class EngineParams:
    """Tunable knobs of the safety engine; defaults are the real-use values.

    ``t_airborne`` defaults to 3 hours; the bundled demo scenarios override
    it to 6 seconds so decay is visible within a short replay.
    ``legacy_decay`` selects the alternative printed decay form for fidelity
    experiments (see contamination.contamination_level).
    """

    bubble_radius: float = DEFAULT_BUBBLE_RADIUS_M
    t_airborne: float = 10_800.0  # seconds
    c_start: float = 100.0  # percent
    horizon: float = 3.0  # seconds
    horizon_step: float = 0.5  # seconds
    update_period: float = 1.0  # seconds
    stale_timeout: float = 5.0  # seconds
    legacy_decay: bool = False

    def __post_init__(self) -> None:
        for name in ("bubble_radius", "t_airborne", "c_start", "horizon",
                     "horizon_step", "update_period", "stale_timeout"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"EngineParams.{name} must be positive, got {v}")
        if self.bubble_radius < MIN_BUBBLE_RADIUS_M:
            raise ValueError("bubble_radius below the 6 ft floor")
        if not 0 < self.c_start <= 100:
            raise ValueError("c_start must be in (0, 100]")
        if self.horizon_step > self.horizon:
            raise ValueError("horizon_step must not exceed horizon")


def bubble_of(s: PedestrianState, p: EngineParams) -> Circle:
    """Safety bubble: circle of the configured radius around the pedestrian."""
    return Circle(s.position, p.bubble_radius)


def circles_intersect(a: Circle, b: Circle) -> bool:
    """True iff the circles touch or overlap (tangency counts: conservative)."""
    dx = a.center.x - b.center.x
    dy = a.center.y - b.center.y
    rsum = a.radius + b.radius
    return dx * dx + dy * dy <= rsum * rsum


def _finite_number(raw: Mapping[str, object], key: str) -> float:
    v = raw.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise NonFiniteField(f"{key} must be a finite number")
    return float(v)


def validate_state(
    raw: Mapping[str, object],
    frame: FrameOrigin,
    prev_stamp: Optional[int] = None,
) -> PedestrianState:
    """Range-check decoded wire fields and build a PedestrianState.

    Rejections are per-invariant exceptions; the caller drops the message and
    keeps the previous state for that id. ``prev_stamp`` enforces per-id
    timestamp monotonicity: out-of-order updates are dropped, never reordered.
    """
    ped_id = raw.get("id")
    if not isinstance(ped_id, str) or not ped_id:
        raise EmptyId("id must be a non-empty string")

    lat = _finite_number(raw, "lat")
    lon = _finite_number(raw, "lon")
    if not -90.0 <= lat <= 90.0:
        raise LatOutOfRange(f"lat {lat}")
    if not -180.0 <= lon <= 180.0:
        raise LonOutOfRange(f"lon {lon}")

    speed = _finite_number(raw, "speed_mps")
    if speed < 0:
        raise NegativeSpeed(f"speed {speed}")
    if speed > SPEED_CAP_MPS:
        raise SpeedExceedsCap(f"speed {speed} above {SPEED_CAP_MPS} m/s cap")

    heading = _finite_number(raw, "heading_deg")
    if not 0.0 <= heading < 360.0:
        raise HeadingOutOfRange(f"heading {heading}")

    healthy = raw.get("healthy")
    if not isinstance(healthy, bool):
        raise NonFiniteField("healthy must be a boolean")

    t_ms = raw.get("t_ms")
    if isinstance(t_ms, bool) or not isinstance(t_ms, int):
        raise NonFiniteField("t_ms must be an integer")
    if prev_stamp is not None and t_ms < prev_stamp:
        raise StaleStamp(f"stamp {t_ms} before {prev_stamp}")

    geo = GeoPoint(lat, lon)
    return PedestrianState(
        id=ped_id,
        position=to_local(geo, frame),
        geo=geo,
        speed=speed,
        theta=heading_to_theta(heading),
        healthy=healthy,
        stamp=t_ms,
    )
