import json

import pytest

from walksafe.geodesy import FrameOrigin, GeoPoint, LocalPoint, to_geo
from walksafe.model import EngineParams
from walksafe.protocol import StateMessage, decode_advisory, decode_state, encode_state
from walksafe.server import Relay

ORIGIN = GeoPoint(40.0, -83.0)
FRAME = FrameOrigin(ORIGIN)


def state_text(ped_id, x=0.0, y=0.0, t_ms=0, healthy=True, speed=0.0, heading=0.0):
    geo = to_geo(LocalPoint(x, y), FRAME)
    msg = StateMessage(id=ped_id, lat=geo.lat, lon=geo.lon, speed_mps=speed,
                       heading_deg=heading, healthy=healthy, t_ms=t_ms)
    return encode_state(msg)


def make_relay(**kwargs):
    kwargs.setdefault("frame", FRAME)
    return Relay(**kwargs)


def attach_clients(relay, ids):
    inboxes = {i: [] for i in ids}
    sessions = {i: relay.attach(inboxes[i].append) for i in ids}
    return inboxes, sessions


def test_fanout_one_sender_nine_receivers():
    relay = make_relay()
    ids = [f"c{i}" for i in range(10)]
    inboxes, sessions = attach_clients(relay, ids)
    accepted = relay.handle_text(sessions["c0"], state_text("c0"), now=0)
    assert accepted is not None
    assert len(inboxes["c0"]) == 0  # no self-echo
    for i in ids[1:]:
        assert len(inboxes[i]) == 1
        assert decode_state(inboxes[i][0]).id == "c0"


def test_lonely_sender_no_error():
    relay = make_relay()
    inboxes, sessions = attach_clients(relay, ["solo"])
    assert relay.handle_text(sessions["solo"], state_text("solo"), now=0) is not None
    assert inboxes["solo"] == []


def test_failing_receiver_does_not_block_others():
    relay = make_relay()

    def broken(_text):
        raise ConnectionError("gone")

    a_inbox, c_inbox = [], []
    sender = relay.attach(a_inbox.append)
    relay.attach(broken)  # failing session sits between the healthy ones
    relay.attach(c_inbox.append)

    relay.handle_text(sender, state_text("a"), now=0)
    assert len(c_inbox) == 1
    # failing session was marked dead and reaped
    assert all(not s.dead for s in relay._sessions)
    assert len(relay._sessions) == 2


def test_per_receiver_ordering_preserved():
    relay = make_relay()
    inboxes, sessions = attach_clients(relay, ["s", "r"])
    for t in range(5):
        relay.handle_text(sessions["s"], state_text("s", x=float(t), t_ms=t * 1000), now=t * 1000)
    stamps = [decode_state(m).t_ms for m in inboxes["r"]]
    assert stamps == [0, 1000, 2000, 3000, 4000]


def test_invalid_message_dropped_previous_state_kept():
    relay = make_relay()
    inboxes, sessions = attach_clients(relay, ["a", "b"])
    relay.handle_text(sessions["a"], state_text("a", t_ms=1000), now=1000)
    assert relay.handle_text(sessions["a"], "{broken", now=2000) is None
    bad_speed = json.loads(state_text("a", t_ms=2000))
    bad_speed["speed_mps"] = -4.0
    assert relay.handle_text(sessions["a"], json.dumps(bad_speed), now=2000) is None
    # out-of-order stamp also dropped
    assert relay.handle_text(sessions["a"], state_text("a", t_ms=500), now=3000) is None
    assert relay._latest["a"].stamp == 1000
    assert len(inboxes["b"]) == 1


def test_reconnecting_id_displaces_old_session():
    relay = make_relay()
    inboxes, sessions = attach_clients(relay, ["x", "peer"])
    relay.handle_text(sessions["x"], state_text("x", t_ms=0), now=0)

    new_inbox = []
    new_session = relay.attach(new_inbox.append)
    relay.handle_text(new_session, state_text("x", t_ms=1000), now=1000)

    assert sessions["x"] not in relay._sessions
    relay.handle_text(sessions["peer"], state_text("peer", t_ms=1000), now=1000)
    assert len(new_inbox) == 1  # new session receives peer traffic
    assert len(inboxes["peer"]) == 2


def test_evict_stale_and_trail_persists():
    params = EngineParams()  # t_airborne 3 h: puffs outlive the eviction
    relay = make_relay(params=params, advisory=True)
    inboxes, sessions = attach_clients(relay, ["sick", "watcher"])

    for t in range(3):
        now = t * 1000
        relay.handle_text(sessions["sick"], state_text("sick", x=0, y=0, t_ms=now, healthy=False), now=now)
        relay.handle_text(sessions["watcher"], state_text("watcher", x=40, y=0, t_ms=now), now=now)
        relay.tick(now)

    # watcher sees the live bubble plus trail
    adv = decode_advisory(inboxes["watcher"][-1])
    kinds = {z.kind for z in adv.zones}
    assert kinds == {"LivePedestrian", "Trail"}

    # sick goes silent; watcher keeps updating
    for t in range(3, 10):
        now = t * 1000
        relay.handle_text(sessions["watcher"], state_text("watcher", x=40, y=0, t_ms=now), now=now)
        inboxes["watcher"].clear()
        relay.tick(now)

    assert all(s.ped_id != "sick" for s in relay._sessions)  # evicted (silent > 5 s)
    adv = decode_advisory(inboxes["watcher"][-1])
    kinds = [z.kind for z in adv.zones]
    assert "LivePedestrian" not in kinds  # live bubble vanished
    # one puff per tick while the session was live (t=0..7), all still decaying
    assert kinds.count("Trail") == 8


def test_fresh_sessions_not_evicted():
    relay = make_relay()
    _, sessions = attach_clients(relay, ["a", "b"])
    relay.handle_text(sessions["a"], state_text("a"), now=0)
    relay.handle_text(sessions["b"], state_text("b"), now=0)
    assert relay.evict_stale(4000) == []
    assert relay.evict_stale(5001) == ["a", "b"]


def test_advisory_single_healthy_client_always_safe():
    relay = make_relay(advisory=True)
    inboxes, sessions = attach_clients(relay, ["solo"])
    for t in range(5):
        now = t * 1000
        relay.handle_text(sessions["solo"], state_text("solo", t_ms=now), now=now)
        relay.tick(now)
    advisories = [decode_advisory(m) for m in inboxes["solo"]]
    assert len(advisories) == 5
    assert all(a.state == "AreaSafe" and a.zones == () for a in advisories)


def test_advisory_zones_match_engine_view():
    relay = make_relay(advisory=True)
    inboxes, sessions = attach_clients(relay, ["sick", "user"])
    now = 0
    relay.handle_text(sessions["sick"], state_text("sick", x=0, y=0, healthy=False), now=now)
    relay.handle_text(sessions["user"], state_text("user", x=10, y=0), now=now)
    out = relay.advisory_tick(now)

    states = list(relay._latest.values())
    zones = relay.engine.zones_for(states, now, exclude_id="user")
    adv = out["user"]
    assert adv.state == "InRedZone"
    assert len(adv.zones) == len(zones)
    for wire, zone in zip(adv.zones, zones):
        assert wire.kind == zone.kind.value
        assert wire.level_pct == pytest.approx(zone.level)
        assert wire.radius_m == pytest.approx(zone.area.radius)


def test_websocket_end_to_end():
    from fastapi.testclient import TestClient

    from walksafe.server import create_app

    relay = make_relay()
    app = create_app(relay, tick_hz=50.0)
    with TestClient(app) as client:
        with client.websocket_connect("/v1/stream") as ws_a, \
             client.websocket_connect("/v1/stream") as ws_b:
            ws_a.send_text(state_text("alice", x=1.0, t_ms=0))
            ws_b.send_text(state_text("bob", x=2.0, t_ms=0))
            seen = decode_state(ws_b.receive_text())
            assert seen.id == "alice"
            seen = decode_state(ws_a.receive_text())
            assert seen.id == "bob"
