"""Constant-velocity prediction and the three-state warning machine.

A pedestrian's near-future positions are extrapolated with an unchanged
speed/heading model and swept (with the full safety bubble, conservatively)
across the red-zone set over a short look-ahead horizon. Current overlap
beats predicted overlap; anything else is safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .contamination import RedZone
from .geodesy import LocalPoint
from .model import Circle, EngineParams, PedestrianState, SPEED_CAP_MPS, bubble_of, circles_intersect


class WarningLevel(enum.Enum):
    AREA_SAFE = "AreaSafe"
    RED_ZONE_PREDICTED = "RedZonePredicted"
    IN_RED_ZONE = "InRedZone"


class AlertPattern(enum.Enum):
    NONE = "None"
    INTERMITTENT = "Intermittent"
    CONTINUOUS = "Continuous"


@dataclass(frozen=True)
class Velocity:
    vx: float  # m/s east
    vy: float  # m/s north

    def __post_init__(self) -> None:
        if not (math.isfinite(self.vx) and math.isfinite(self.vy)):
            raise ValueError("velocity components must be finite")
        if math.hypot(self.vx, self.vy) > SPEED_CAP_MPS * (1 + 1e-9):
            raise ValueError("velocity magnitude above speed cap")


@dataclass(frozen=True)
class WarningState:
    level: WarningLevel
    cause: Optional[RedZone] = None
    time_to_contact: Optional[float] = None  # seconds, only when predicted

    def __post_init__(self) -> None:
        if (self.cause is None) != (self.level is WarningLevel.AREA_SAFE):
            raise ValueError("cause present iff state is not AreaSafe")
        if (self.time_to_contact is None) == (self.level is WarningLevel.RED_ZONE_PREDICTED):
            raise ValueError("time_to_contact present iff state is RedZonePredicted")


def velocity_components(speed: float, theta: float) -> Velocity:
    """Split speed/heading into east/north components."""
    if speed < 0:
        raise ValueError("speed must be non-negative")
    return Velocity(speed * math.cos(theta), speed * math.sin(theta))


def predict_position(s: PedestrianState, dt: float) -> LocalPoint:
    """Constant-velocity extrapolation of the pedestrian's position."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    v = velocity_components(s.speed, s.theta)
    return LocalPoint(s.position.x + v.vx * dt, s.position.y + v.vy * dt)


def _center_dist(c: Circle, z: RedZone) -> float:
    return math.hypot(c.center.x - z.area.center.x, c.center.y - z.area.center.y)


def classify(s: PedestrianState, zones: Sequence[RedZone], p: EngineParams) -> WarningState:
    """Three-state classification against the current red-zone set.

    Precedence is strict: a current bubble overlap always wins over a
    predicted one. Prediction samples the horizon at horizon_step
    granularity; at the configured step and speed cap a straight crossing
    cannot tunnel between samples. Ties break deterministically: smallest
    contact time, then smallest center distance, then zone list order.
    """
    bubble = bubble_of(s, p)

    hit: Optional[RedZone] = None
    hit_dist = math.inf
    for zone in zones:
        if circles_intersect(bubble, zone.area):
            d = _center_dist(bubble, zone)
            if d < hit_dist:
                hit, hit_dist = zone, d
    if hit is not None:
        return WarningState(level=WarningLevel.IN_RED_ZONE, cause=hit)

    steps = int(round(p.horizon / p.horizon_step))
    for k in range(1, steps + 1):
        dt = k * p.horizon_step
        future = Circle(predict_position(s, dt), p.bubble_radius)
        best: Optional[RedZone] = None
        best_dist = math.inf
        for zone in zones:
            if circles_intersect(future, zone.area):
                d = _center_dist(future, zone)
                if d < best_dist:
                    best, best_dist = zone, d
        if best is not None:
            return WarningState(
                level=WarningLevel.RED_ZONE_PREDICTED,
                cause=best,
                time_to_contact=dt,
            )

    return WarningState(level=WarningLevel.AREA_SAFE)


def alert_signal(w: WarningState) -> AlertPattern:
    """Map a warning state to its alert channel pattern."""
    if w.level is WarningLevel.IN_RED_ZONE:
        return AlertPattern.CONTINUOUS
    if w.level is WarningLevel.RED_ZONE_PREDICTED:
        return AlertPattern.INTERMITTENT
    return AlertPattern.NONE
