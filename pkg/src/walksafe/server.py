"""Cloud relay: validate, broadcast and (optionally) advise.

The transport-agnostic ``Relay`` holds all protocol behavior and is driven
by whoever owns time: the asyncio WebSocket app in live mode, or a test
harness with a logical clock. Sessions are plain send-callables, so the
fan-out, eviction and advisory logic is fully exercisable in-process.
"""

from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from fastapi import WebSocket, WebSocketDisconnect

from .contamination import RedZone
from .engine import Engine
from .geodesy import FrameOrigin, GeoPoint, to_geo
from .model import EngineParams, PedestrianState, ValidationError, validate_state
from .prediction import WarningState
from .protocol import (
    AdvisoryMessage,
    AdvisoryZone,
    ProtocolError,
    decode_state,
    encode_advisory,
    encode_state,
)

logger = logging.getLogger(__name__)


@dataclass
class ClientSession:
    """One connected client. ``ped_id`` is claimed by its first valid state
    message; a reconnecting id displaces the older session."""

    send: Callable[[str], None]
    ped_id: Optional[str] = None
    last_seen: int = 0
    dead: bool = False
    serial: int = field(default=0)


class Relay:
    def __init__(self, params: Optional[EngineParams] = None, frame: Optional[FrameOrigin] = None,
                 advisory: bool = False):
        self.params = params or EngineParams()
        self.frame = frame  # first received position fixes it when None
        self.advisory = advisory
        self.engine = Engine(self.params)
        self._sessions: List[ClientSession] = []
        self._by_id: Dict[str, ClientSession] = {}
        self._latest: Dict[str, PedestrianState] = {}
        self._stamps: Dict[str, int] = {}
        self._next_serial = 0

    # -- session lifecycle -------------------------------------------------

    def attach(self, send: Callable[[str], None], now: int = 0) -> ClientSession:
        session = ClientSession(send=send, last_seen=now, serial=self._next_serial)
        self._next_serial += 1
        self._sessions.append(session)
        return session

    def detach(self, session: ClientSession) -> None:
        session.dead = True
        self._reap()

    def _reap(self) -> None:
        for s in [s for s in self._sessions if s.dead]:
            self._sessions.remove(s)
            if s.ped_id is not None and self._by_id.get(s.ped_id) is s:
                del self._by_id[s.ped_id]
                self._latest.pop(s.ped_id, None)

    # -- inbound -----------------------------------------------------------

    def handle_text(self, session: ClientSession, text: str, now: int) -> Optional[PedestrianState]:
        """Decode, validate and broadcast one inbound frame.

        Invalid frames are dropped (previous state kept); returns the
        accepted state or None.
        """
        try:
            msg = decode_state(text)
        except ProtocolError as exc:
            logger.debug("dropped frame: %s", exc)
            return None

        # a session evicted for silence revives on its next valid frame
        if session.dead or session not in self._sessions:
            session.dead = False
            if session not in self._sessions:
                self._sessions.append(session)

        if self.frame is None:
            self.frame = FrameOrigin(GeoPoint(msg.lat, msg.lon))

        try:
            state = validate_state(msg.fields(), self.frame, self._stamps.get(msg.id))
        except (ValidationError, ValueError) as exc:
            logger.debug("dropped state from %s: %s", msg.id, exc)
            return None

        self._claim(session, state.id)
        session.last_seen = now
        self._stamps[state.id] = state.stamp
        self._latest[state.id] = state
        self.broadcast(session, encode_state(msg))
        return state

    def _claim(self, session: ClientSession, ped_id: str) -> None:
        previous = self._by_id.get(ped_id)
        if previous is not None and previous is not session:
            previous.dead = True  # last writer wins
        if session.ped_id is None:
            session.ped_id = ped_id
        self._by_id[ped_id] = session
        self._reap()

    # -- fan-out -----------------------------------------------------------

    def broadcast(self, sender: ClientSession, encoded: str) -> int:
        """Deliver to every other live session exactly once; a failing
        receiver is marked dead and never blocks the rest."""
        delivered = 0
        for session in self._sessions:
            if session is sender or session.dead:
                continue
            try:
                session.send(encoded)
                delivered += 1
            except Exception:
                logger.warning("send failed; evicting session %s", session.ped_id)
                session.dead = True
        self._reap()
        return delivered

    # -- periodic work -----------------------------------------------------

    def evict_stale(self, now: int) -> List[str]:
        """Drop sessions silent past the timeout. Their live bubbles vanish;
        any trail puffs they emitted keep decaying naturally."""
        timeout_ms = self.params.stale_timeout * 1000.0
        evicted: List[str] = []
        for session in self._sessions:
            if now - session.last_seen > timeout_ms:
                session.dead = True
                if session.ped_id is not None:
                    evicted.append(session.ped_id)
        self._reap()
        return evicted

    def advisory_tick(self, now: int) -> Dict[str, AdvisoryMessage]:
        """Run the engine once over all live states and send each bound
        client exactly one advisory."""
        states = [self._latest[s.ped_id] for s in self._sessions
                  if s.ped_id is not None and s.ped_id in self._latest]
        results = self.engine.step(states, now)
        out: Dict[str, AdvisoryMessage] = {}
        for session in list(self._sessions):
            pid = session.ped_id
            if pid is None or pid not in results:
                continue
            zones = self.engine.zones_for(states, now, exclude_id=pid)
            advisory = self._to_advisory(pid, results[pid].warning, zones)
            out[pid] = advisory
            try:
                session.send(encode_advisory(advisory))
            except Exception:
                logger.warning("advisory send failed; evicting %s", pid)
                session.dead = True
        self._reap()
        return out

    def tick(self, now: int) -> None:
        self.evict_stale(now)
        if self.advisory:
            self.advisory_tick(now)

    def _to_advisory(self, pid: str, warning: WarningState, zones: List[RedZone]) -> AdvisoryMessage:
        assert self.frame is not None
        wire_zones = []
        for z in zones:
            geo = to_geo(z.area.center, self.frame)
            wire_zones.append(AdvisoryZone(lat=geo.lat, lon=geo.lon, radius_m=z.area.radius,
                                           level_pct=z.level, kind=z.kind.value))
        return AdvisoryMessage(id=pid, state=warning.level.value,
                               ttc_s=warning.time_to_contact, zones=tuple(wire_zones))


# -- live WebSocket app ----------------------------------------------------

def create_app(relay: Relay, tick_hz: float = 1.0):
    """FastAPI app exposing the stream at /v1/stream with a wall-clock
    ticker. Per-session outbound queues keep broadcast sends from ever
    holding up the registry."""
    from contextlib import asynccontextmanager

    from fastapi import FastAPI

    epoch = time.monotonic()

    def now_ms() -> int:
        return int((time.monotonic() - epoch) * 1000)

    async def ticker() -> None:
        period = 1.0 / tick_hz
        while True:
            await asyncio.sleep(period)
            relay.tick(now_ms())

    @asynccontextmanager
    async def lifespan(app):
        task = asyncio.create_task(ticker())
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(lifespan=lifespan)

    @app.websocket("/v1/stream")
    async def stream(ws: WebSocket) -> None:
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue()
        session = relay.attach(queue.put_nowait, now=now_ms())

        async def writer() -> None:
            while True:
                await ws.send_text(await queue.get())

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                text = await ws.receive_text()
                relay.handle_text(session, text, now=now_ms())
        except WebSocketDisconnect:
            pass
        finally:
            writer_task.cancel()
            relay.detach(session)

    return app
