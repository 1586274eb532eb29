"""Per-tick safety pipeline shared by the replay harness and the server.

One tick: emit puffs for every unhealthy pedestrian, prune the decayed ones,
then classify each pedestrian against the red zones everyone else produced.
Emission happens for all pedestrians before any classification so results
never depend on iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

from .contamination import (
    ContaminationField,
    active_red_zones,
    emit_puff,
    prune_expired,
)
from .model import EngineParams, PedestrianState
from .prediction import AlertPattern, WarningState, alert_signal, classify


@dataclass(frozen=True)
class TickResult:
    warning: WarningState
    alert: AlertPattern
    zones_active: int


class Engine:
    """Owns the contamination field and advances it one tick at a time."""

    def __init__(self, params: EngineParams):
        self.params = params
        self.field = ContaminationField()

    def step(self, states: Sequence[PedestrianState], now: int) -> Dict[str, TickResult]:
        """Advance the field to ``now`` and classify every pedestrian.

        ``states`` are the freshest accepted states of all live pedestrians;
        stale ones must already be evicted by the caller.
        """
        for s in states:
            puff = emit_puff(s, self.params, now)
            if puff is not None:
                self.field = self.field.with_puff(puff)
        self.field = prune_expired(self.field, self.params, now)

        results: Dict[str, TickResult] = {}
        for s in states:
            zones = active_red_zones(self.field, states, self.params, now, exclude_id=s.id)
            warning = classify(s, zones, self.params)
            results[s.id] = TickResult(
                warning=warning,
                alert=alert_signal(warning),
                zones_active=len(zones),
            )
        return results

    def zones_for(self, states: Sequence[PedestrianState], now: int, exclude_id: str) -> List:
        """Red zones as one pedestrian sees them right now (no emission)."""
        return active_red_zones(self.field, states, self.params, now, exclude_id=exclude_id)
