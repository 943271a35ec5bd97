import json
import math

import pytest

import gazedwell as gd

LAYOUT = {
    "screen": [1280, 1024],
    "links": [
        {"id": 1, "left": 100, "top": 100, "width": 120, "height": 24},
        {"id": 2, "left": 500, "top": 400, "width": 120, "height": 24},
    ],
}


def test_box_distance_and_assignment():
    assert gd.box_distance(150, 110, 100, 100, 120, 24) == 0.0
    assert gd.box_distance(240, 110, 100, 100, 120, 24) == 20.0
    assert gd.assign_gaze(560, 412, LAYOUT) == 2
    assert gd.assign_gaze(900, 900, LAYOUT) is None


def test_segment_and_infer():
    points = [(560 + i % 3, 412) for i in range(30)] + [(160, 112) for _ in range(30)]
    labels, fixations = gd.segment(points)
    assert len(labels) == len(points)
    assert set(labels) <= set("fso")
    post = gd.infer(points, LAYOUT)
    assert len(post) == 2
    assert math.isclose(sum(post), 1.0, abs_tol=1e-9)


def test_forward_posterior_and_baseline():
    fix = [{"x": 560, "y": 412, "duration_ms": 300}]
    post = gd.forward_posterior(fix, LAYOUT)
    assert post[1] > post[0]
    assert gd.last_fixated_baseline(fix, LAYOUT) == 2


def test_policy():
    assert gd.nominal_dwell(0.3, (400, 100, 300, 0.6)) == pytest.approx(350.0)
    assert gd.assign_dwells([1.0, 0.0], (500, 100, 100, 1)) == [6, 30]
    with pytest.raises(ValueError):
        gd.nominal_dwell(0.5, (100, 200, 150, 0.5))


def test_simulate_and_grid_are_deterministic():
    trials = gd.synth(20, seed=3, distractor_rate=0.3)
    assert trials == gd.synth(20, seed=3, distractor_rate=0.3)
    r = gd.simulate(trials, (500, 100, 100, 1))
    assert r["n_trials"] == 20
    assert 0.0 <= r["error_rate"] <= 1.0
    a = gd.grid(trials, time_stride=6, p_step=0.5, threads=1)
    b = gd.grid(trials, time_stride=6, p_step=0.5, threads=3)
    assert a == b
    assert a.startswith("tmax_ms,tmin_ms,tbreak_ms,pbreak")


def test_malformed_trials_raise():
    with pytest.raises(ValueError):
        gd.simulate("not a trace file", (500, 500, 500, 1))


def test_gateway_session():
    s = gd.GatewaySession()
    ack = json.loads(s.handle(json.dumps({"type": "HELLO", "protocol_version": gd.PROTOCOL_VERSION}))[0])
    assert ack == {"type": "ACK", "of": "HELLO", "protocol_version": "gdw/1"}
    assert json.loads(s.handle(json.dumps({"type": "PAGE_LAYOUT", "layout": LAYOUT}))[0])["of"] == "PAGE_LAYOUT"
    replies = []
    for t in range(24):
        replies += s.handle(json.dumps({"type": "GAZE", "t": t, "x": 1230, "y": 384}))
    kinds = [json.loads(r)["type"] for r in replies]
    assert kinds == ["COMMAND", "DWELLS"]
    err = json.loads(s.handle(json.dumps({"type": "GAZE", "t": 3, "x": 0, "y": 0}))[0])
    assert err["code"] == "out_of_order"
    assert s.closed


def test_fixture_params_round_trip():
    text = gd.fixture_params()
    assert "intent.p_s" in text
    trials = gd.synth(5, seed=2, params=text)
    assert trials == gd.synth(5, seed=2)
