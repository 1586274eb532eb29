"""Conversions between geographic coordinates and a local planar frame.

All bubble and prediction math runs in a flat east/north frame measured in
meters. An equirectangular projection about a per-session origin is accurate
to well under a centimeter at street scale, which is all we need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0

# Small-area assumption: points further than this from the frame origin are
# outside the regime where the flat-frame math is trustworthy.
MAX_FRAME_OFFSET_DEG = 1.0


class GeodesyError(ValueError):
    """Invalid geographic input or a degenerate frame."""


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise GeodesyError("GeoPoint components must be finite")
        if not -90.0 <= self.lat <= 90.0:
            raise GeodesyError(f"latitude {self.lat} out of [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise GeodesyError(f"longitude {self.lon} out of [-180, 180]")


@dataclass(frozen=True)
class LocalPoint:
    """Meters east (x) and north (y) of the frame origin."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeodesyError("LocalPoint components must be finite")


@dataclass(frozen=True)
class FrameOrigin:
    """Anchors the local planar frame at a geographic origin."""

    origin: GeoPoint
    earth_radius: float = EARTH_RADIUS_M

    def __post_init__(self) -> None:
        if not self.earth_radius > 0:
            raise GeodesyError("earth_radius must be positive")


def to_local(p: GeoPoint, f: FrameOrigin) -> LocalPoint:
    """Project a geographic point into the frame's east/north meters."""
    if abs(p.lat - f.origin.lat) >= MAX_FRAME_OFFSET_DEG or abs(p.lon - f.origin.lon) >= MAX_FRAME_OFFSET_DEG:
        raise GeodesyError("point too far from frame origin for flat-frame math")
    x = f.earth_radius * math.radians(p.lon - f.origin.lon) * math.cos(math.radians(f.origin.lat))
    y = f.earth_radius * math.radians(p.lat - f.origin.lat)
    return LocalPoint(x, y)


def to_geo(p: LocalPoint, f: FrameOrigin) -> GeoPoint:
    """Exact algebraic inverse of :func:`to_local`."""
    if abs(p.x) >= 100_000.0 or abs(p.y) >= 100_000.0:
        raise GeodesyError("local point too far from frame origin")
    cos_lat = math.cos(math.radians(f.origin.lat))
    if abs(cos_lat) < 1e-12:
        raise GeodesyError("frame origin at a pole is singular")
    lat = f.origin.lat + math.degrees(p.y / f.earth_radius)
    lon = f.origin.lon + math.degrees(p.x / (f.earth_radius * cos_lat))
    return GeoPoint(lat, lon)


def heading_to_theta(heading_deg: float) -> float:
    """Compass heading (clockwise from North) to math radians.

    theta = 0 points East, counterclockwise positive, result in (-pi, pi].
    """
    if not math.isfinite(heading_deg):
        raise GeodesyError("heading must be finite")
    heading_deg = heading_deg % 360.0
    theta = math.pi / 2.0 - math.radians(heading_deg)
    # wrap into (-pi, pi]
    while theta <= -math.pi:
        theta += 2.0 * math.pi
    while theta > math.pi:
        theta -= 2.0 * math.pi
    return theta


def theta_to_heading(theta: float) -> float:
    """Math radians back to compass degrees in [0, 360)."""
    if not math.isfinite(theta):
        raise GeodesyError("theta must be finite")
    return (90.0 - math.degrees(theta)) % 360.0


def haversine_m(a: GeoPoint, b: GeoPoint, radius: float = EARTH_RADIUS_M) -> float:
    """Great-circle distance in meters; the independent check against the
    planar frame's straight-line distance."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    d_phi = math.radians(b.lat - a.lat)
    d_lambda = math.radians(b.lon - a.lon)
    h = math.sin(d_phi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(d_lambda / 2.0) ** 2
    return 2.0 * radius * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))
