import json
import os
import subprocess

import pytest

import airkit

TOY_ROWS = [
    {"machine_id": "m", "state": "UP", "duration_hours": 1, "censored": 1},
    {"machine_id": "m", "state": "DOWN", "duration_hours": 2, "censored": 0},
    {"machine_id": "m", "state": "UP", "duration_hours": 3, "censored": 0},
    {"machine_id": "m", "state": "DOWN", "duration_hours": 4, "censored": 0},
    {"machine_id": "m", "state": "UP", "duration_hours": 5, "censored": 1},
]


def test_estimate_toy_table():
    e = airkit.estimate(TOY_ROWS)
    assert e["mttf"] == 4.5
    assert e["mttr"] == 3.0
    assert e["air"] == pytest.approx(airkit.HOURS_PER_100_VM_YEARS / 4.5, rel=1e-11)


def test_heartbeats_feed_estimate():
    beats = "machine_id,timestamp,status\nvm,0,ALIVE\nvm,300,ALIVE\nvm,600,ALIVE\nvm,2400,ALIVE\n"
    states = airkit.compress_heartbeats(beats, 0, 3000)
    assert states.startswith("machine_id,state,duration_hours,censored\n")
    assert airkit.estimate(states)["n_failures"] == 1


def test_ump_test_known_value():
    r = airkit.ump_test(15, 1.0, 5, 1.0)
    assert r["p_value"] == pytest.approx(21700 / 2**20, abs=1e-12)
    assert airkit.binomial_tail(15, 20, 0.5) == pytest.approx(21700 / 2**20, abs=1e-12)
    with pytest.raises(ValueError):
        airkit.ump_test(1, 0.0, 1, 1.0)


def test_calibration_is_deterministic_across_workers():
    config = {"null_process": {"kind": "poisson", "rate": 1}, "t1": 20, "t2": 20,
              "replications": 1000, "grid_step": 0.05, "master_seed": 5}
    a = airkit.calibrate_null(config, workers=1)
    b = airkit.calibrate_null(json.dumps(config), workers=3)
    assert a == b
    assert a["alpha_hat"][0] == 0 and a["alpha"][0] == 0
    curve = airkit.power_curve(config, 2.0)
    assert len(curve["beta"]) == len(a["alpha_hat"])


def test_moments_and_samples():
    spec = {"kind": "compound_poisson", "node_rate": 2, "batch": {"kind": "geometric", "p": 0.5}}
    m = airkit.moments(spec, 3.0)
    assert m["mean"] == pytest.approx(12.0)
    assert m["variance"] == pytest.approx(36.0)
    draws = airkit.sample_counts(spec, 3.0, 2000, 11)
    assert draws == airkit.sample_counts(spec, 3.0, 2000, 11)
    assert abs(sum(draws) / len(draws) - 12.0) < 1.0


def test_recommend_wait():
    rec = airkit.recommend_wait({"process": {"kind": "poisson", "rate": 10}, "effect_size": 2,
                                 "target_alpha": 0.05, "target_beta": 0.2,
                                 "replications": 500, "master_seed": 3})
    assert rec["feasible"]
    assert rec["t1"] == rec["t2"]


def test_service_handle():
    status, body = airkit.handle("GET", "/api/v1/health")
    assert status == 200 and body == {"status": "ok"}
    status, body = airkit.handle("POST", "/api/v1/test", {"n1": 1, "t1": 1, "t2": 1})
    assert status == 400
    assert body["error"]["field"] == "n2"


@pytest.mark.skipif(not os.environ.get("AIRKIT_CLI"), reason="CLI path not provided")
def test_cli_matches_bindings():
    out = subprocess.run([os.environ["AIRKIT_CLI"], "test", "--n1", "15", "--n2", "5", "--t1", "1", "--t2", "1"],
                         check=True, capture_output=True, text=True).stdout
    assert json.loads(out) == airkit.ump_test(15, 1.0, 5, 1.0)
