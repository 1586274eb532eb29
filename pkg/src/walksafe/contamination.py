"""Time-decaying contamination field.

Unhealthy pedestrians leave a circular "puff" at each accepted update; each
puff's contamination percentage decays linearly to zero over the configured
airborne time and the puff is then freed. The union of live unhealthy
bubbles and surviving puffs is the red-zone set everyone else must avoid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from .model import Circle, EngineParams, PedestrianState, bubble_of


class ClockSkewError(ValueError):
    """Asked for a contamination level before the puff was born."""


class ZoneKind(enum.Enum):
    LIVE_PEDESTRIAN = "LivePedestrian"
    TRAIL = "Trail"


@dataclass(frozen=True)
class ContaminationPuff:
    area: Circle
    born: int  # ms since session epoch
    c_start: float  # percent
    emitter: str

    def __post_init__(self) -> None:
        if not 0 < self.c_start <= 100:
            raise ValueError("c_start must be in (0, 100]")


@dataclass(frozen=True)
class RedZone:
    """A circle to avoid: a live unhealthy bubble or a surviving trail puff."""

    area: Circle
    level: float  # percent in (0, 100]
    kind: ZoneKind

    def __post_init__(self) -> None:
        if not self.level > 0:
            raise ValueError("red zone level must be positive")


@dataclass(frozen=True)
class ContaminationField:
    """Surviving puffs in emission order."""

    puffs: Tuple[ContaminationPuff, ...] = ()

    def with_puff(self, puff: ContaminationPuff) -> "ContaminationField":
        return ContaminationField(self.puffs + (puff,))


def emit_puff(s: PedestrianState, p: EngineParams, now: int) -> Optional[ContaminationPuff]:
    """One puff per accepted update for unhealthy pedestrians; none otherwise.

    At the 1 Hz cadence trail spacing is speed * update_period, so walking
    pedestrians leave heavily overlapping circles with no gaps.
    """
    if s.healthy:
        return None
    return ContaminationPuff(area=bubble_of(s, p), born=now, c_start=p.c_start, emitter=s.id)


def contamination_level(puff: ContaminationPuff, p: EngineParams, now: int) -> float:
    """Current contamination percent of a puff.

    Default form is the unique linear decay hitting zero at t_airborne:
    C(t) = c_start * (1 - t / t_airborne), clamped to [0, c_start].
    ``legacy_decay`` selects C(t) = c_start - 100 * t / (c_start * t_airborne)
    instead, which for c_start != sqrt(100 * c_start) does not reach zero at
    t_airborne; it is kept only for side-by-side comparison.
    """
    if now < puff.born:
        raise ClockSkewError(f"now {now} before puff birth {puff.born}")
    t = (now - puff.born) / 1000.0
    if p.legacy_decay:
        c = puff.c_start - (100.0 / (puff.c_start * p.t_airborne)) * t
    else:
        c = puff.c_start * (1.0 - t / p.t_airborne)
    return min(max(c, 0.0), puff.c_start)


def prune_expired(f: ContaminationField, p: EngineParams, now: int) -> ContaminationField:
    """Drop fully decayed puffs; survivors keep their order and fields."""
    kept = tuple(
        puff for puff in f.puffs if contamination_level(puff, p, now) > 0.0
    )
    if len(kept) == len(f.puffs):
        return f
    return ContaminationField(kept)


def active_red_zones(
    f: ContaminationField,
    peers: Iterable[PedestrianState],
    p: EngineParams,
    now: int,
    exclude_id: Optional[str] = None,
) -> List[RedZone]:
    """Red zones visible to one pedestrian: live unhealthy bubbles first, then
    surviving trail puffs, both in stable order.

    ``exclude_id`` removes the querying pedestrian's own bubble and trail;
    nobody is warned about contamination they caused themselves.
    """
    zones: List[RedZone] = []
    for peer in peers:
        if peer.healthy or peer.id == exclude_id:
            continue
        zones.append(RedZone(area=bubble_of(peer, p), level=peer_level(p), kind=ZoneKind.LIVE_PEDESTRIAN))
    for puff in f.puffs:
        if puff.emitter == exclude_id:
            continue
        level = contamination_level(puff, p, now)
        if level > 0.0:
            zones.append(RedZone(area=puff.area, level=level, kind=ZoneKind.TRAIL))
    return zones


def peer_level(p: EngineParams) -> float:
    """Live unhealthy bubbles stay at full strength; only trails decay."""
    return p.c_start
