import math
import random

import pytest
from hypothesis import given, strategies as st

from walksafe.contamination import RedZone, ZoneKind
from walksafe.geodesy import GeoPoint, LocalPoint
from walksafe.model import Circle, EngineParams, PedestrianState
from walksafe.prediction import (
    AlertPattern,
    WarningLevel,
    WarningState,
    alert_signal,
    classify,
    predict_position,
    velocity_components,
)

PARAMS = EngineParams()


def state_at(x, y, speed=0.0, theta=0.0, ped_id="p"):
    return PedestrianState(id=ped_id, position=LocalPoint(x, y),
                           geo=GeoPoint(40.0, -83.0), speed=speed, theta=theta,
                           healthy=True, stamp=0)


def zone_at(x, y, radius=9.144, level=100.0, kind=ZoneKind.TRAIL):
    return RedZone(Circle(LocalPoint(x, y), radius), level, kind)


def test_velocity_components():
    v = velocity_components(0.0, 1.234)
    assert (v.vx, v.vy) == (0.0, 0.0)
    v = velocity_components(2.0, math.pi / 2)
    assert v.vx == pytest.approx(0.0, abs=1e-12)
    assert v.vy == pytest.approx(2.0)
    v = velocity_components(1.5, math.pi / 4)
    assert v.vx == pytest.approx(1.5 * math.cos(math.pi / 4), abs=1e-4)
    assert v.vy == pytest.approx(1.0607, abs=1e-4)


def test_predict_position_examples():
    s = state_at(3.0, -2.0, speed=1.0, theta=0.3)
    p = predict_position(s, 0.0)
    assert (p.x, p.y) == (3.0, -2.0)  # dt=0 identity

    s = state_at(0, 0, speed=2.0, theta=math.pi / 2)
    p = predict_position(s, 3.0)
    assert p.x == pytest.approx(0.0, abs=1e-12)
    assert p.y == pytest.approx(6.0)

    s = state_at(10, -5, speed=1.5, theta=math.pi)
    p = predict_position(s, 2.0)
    assert p.x == pytest.approx(7.0)
    assert p.y == pytest.approx(-5.0, abs=1e-12)


def test_predict_negative_dt_rejected():
    with pytest.raises(ValueError):
        predict_position(state_at(0, 0, speed=1.0), -0.1)


@given(st.floats(0, 3), st.floats(0, 3))
def test_prediction_affine_in_dt(a, b):
    s = state_at(1.0, 2.0, speed=1.3, theta=0.7)
    direct = predict_position(s, a + b)
    mid = predict_position(s, a)
    s2 = PedestrianState(id=s.id, position=mid, geo=s.geo, speed=s.speed,
                         theta=s.theta, healthy=s.healthy, stamp=s.stamp)
    chained = predict_position(s2, b)
    assert chained.x == pytest.approx(direct.x, abs=1e-9)
    assert chained.y == pytest.approx(direct.y, abs=1e-9)


def test_classify_no_zones_is_safe():
    w = classify(state_at(0, 0, speed=1.4), [], PARAMS)
    assert w.level is WarningLevel.AREA_SAFE
    assert w.cause is None and w.time_to_contact is None


def test_classify_standing_overlap_is_in_red_zone():
    # 10 m apart, radii sum 18.288: circle oracle says intersecting
    zone = zone_at(10, 0)
    w = classify(state_at(0, 0), [zone], PARAMS)
    assert w.level is WarningLevel.IN_RED_ZONE
    assert w.cause is zone
    assert w.time_to_contact is None


def test_classify_predicted_contact_rounded_to_grid():
    # analytic contact: gap 24 m closes to 18.288 at dt = (24-18.288)/2 = 2.856 s;
    # first sampled dt on the 0.5 s grid with contact is 3.0
    analytic = (24.0 - 18.288) / 2.0
    assert 2.5 < analytic <= 3.0
    w = classify(state_at(0, 0, speed=2.0, theta=0.0), [zone_at(24, 0)], PARAMS)
    assert w.level is WarningLevel.RED_ZONE_PREDICTED
    assert w.time_to_contact == pytest.approx(3.0)


def test_classify_precedence_current_beats_predicted():
    # both a current overlap and a predicted one ahead: InRedZone wins
    zones = [zone_at(30, 0), zone_at(5, 0)]
    w = classify(state_at(0, 0, speed=10.0, theta=0.0), zones, PARAMS)
    assert w.level is WarningLevel.IN_RED_ZONE
    assert w.cause is zones[1]  # smallest center distance


def test_classify_cause_tiebreak_smallest_dt_then_distance():
    near = zone_at(22, 0)
    far = zone_at(26, 0)
    w = classify(state_at(0, 0, speed=2.0, theta=0.0), [far, near], PARAMS)
    assert w.level is WarningLevel.RED_ZONE_PREDICTED
    assert w.cause is near


def test_zero_speed_still_classified():
    # a zone drifting over a standing user is caught
    w = classify(state_at(0, 0, speed=0.0), [zone_at(15, 0)], PARAMS)
    assert w.level is WarningLevel.IN_RED_ZONE
    w = classify(state_at(0, 0, speed=0.0), [zone_at(20, 0)], PARAMS)
    assert w.level is WarningLevel.AREA_SAFE


def test_no_tunneling_at_speed_cap():
    # 15 m/s straight at a zone: per-step displacement 7.5 m < bubble diameter,
    # so the sweep cannot jump over it
    w = classify(state_at(0, 0, speed=15.0, theta=0.0), [zone_at(40, 0)], PARAMS)
    assert w.level is WarningLevel.RED_ZONE_PREDICTED


def test_rotation_equivariance_randomized():
    rng = random.Random(7)
    for _ in range(200):
        speed = rng.uniform(0, 5)
        theta = rng.uniform(-math.pi, math.pi)
        zones = [zone_at(rng.uniform(-40, 40), rng.uniform(-40, 40))
                 for _ in range(rng.randint(1, 4))]
        base = classify(state_at(0, 0, speed=speed, theta=theta), zones, PARAMS)

        a = rng.uniform(0, 2 * math.pi)
        cos_a, sin_a = math.cos(a), math.sin(a)
        rotated_zones = [
            zone_at(z.area.center.x * cos_a - z.area.center.y * sin_a,
                    z.area.center.x * sin_a + z.area.center.y * cos_a)
            for z in zones
        ]
        rtheta = math.atan2(math.sin(theta + a), math.cos(theta + a))
        rot = classify(state_at(0, 0, speed=speed, theta=rtheta), rotated_zones, PARAMS)
        assert rot.level is base.level


def test_monotone_safety_under_zone_subsets():
    rng = random.Random(11)
    for _ in range(100):
        zones = [zone_at(rng.uniform(-80, 80), rng.uniform(-80, 80))
                 for _ in range(4)]
        s = state_at(0, 0, speed=rng.uniform(0, 3), theta=rng.uniform(-math.pi, math.pi))
        if classify(s, zones, PARAMS).level is WarningLevel.AREA_SAFE:
            for drop in range(4):
                subset = zones[:drop] + zones[drop + 1:]
                assert classify(s, subset, PARAMS).level is WarningLevel.AREA_SAFE


def test_alert_patterns():
    safe = WarningState(level=WarningLevel.AREA_SAFE)
    assert alert_signal(safe) is AlertPattern.NONE
    predicted = WarningState(level=WarningLevel.RED_ZONE_PREDICTED,
                             cause=zone_at(20, 0), time_to_contact=1.5)
    assert alert_signal(predicted) is AlertPattern.INTERMITTENT
    inred = WarningState(level=WarningLevel.IN_RED_ZONE, cause=zone_at(5, 0))
    assert alert_signal(inred) is AlertPattern.CONTINUOUS


def test_warning_state_invariants():
    with pytest.raises(ValueError):
        WarningState(level=WarningLevel.AREA_SAFE, cause=zone_at(1, 1))
    with pytest.raises(ValueError):
        WarningState(level=WarningLevel.RED_ZONE_PREDICTED, cause=zone_at(1, 1))
