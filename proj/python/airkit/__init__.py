"""Python bindings for the airkit reliability toolkit.

Structured values use the same JSON shapes as the HTTP service and the CLI.
"""

import json

from . import _airkit

HOURS_PER_100_VM_YEARS = _airkit.HOURS_PER_100_VM_YEARS


def _dumps(value):
    return value if isinstance(value, str) else json.dumps(value)


def compress_heartbeats(csv, window_start, window_end, period=300, gap_factor=3.0):
    """Heartbeat CSV text to state-log CSV text."""
    return _airkit.compress_heartbeats_csv(csv, period, gap_factor, window_start, window_end)


def estimate(rows):
    """Rate estimate from state rows (list of dicts) or state-log CSV text."""
    if isinstance(rows, str):
        return json.loads(_airkit.estimate_csv(rows))
    return json.loads(_airkit.estimate_rows(json.dumps(rows)))


def ump_test(n1, t1, n2, t2, alternative="greater", scale_factor=1.0):
    return json.loads(_airkit.test(n1, t1, n2, t2, alternative, scale_factor))


def binomial_tail(k, n, p, upper=True):
    return _airkit.binomial_tail(k, n, p, upper)


def calibrate_null(config, workers=1):
    return json.loads(_airkit.calibrate(_dumps(config), workers))


def power_curve(config, effect_size, workers=1):
    return json.loads(_airkit.power_curve(_dumps(config), effect_size, workers))


def recommend_wait(query, workers=1):
    return json.loads(_airkit.recommend_wait(_dumps(query), workers))


def sample_counts(process, horizon, n, seed):
    return _airkit.sample_counts(_dumps(process), horizon, n, seed)


def moments(process, horizon):
    return json.loads(_airkit.moments(_dumps(process), horizon))


def handle(method, path, body=""):
    """Routes one request through the service API; returns (status, parsed body)."""
    status, text = _airkit.handle(method, path, _dumps(body) if body != "" else "")
    return status, json.loads(text) if text else None


__all__ = [
    "HOURS_PER_100_VM_YEARS",
    "binomial_tail",
    "calibrate_null",
    "compress_heartbeats",
    "estimate",
    "handle",
    "moments",
    "power_curve",
    "recommend_wait",
    "sample_counts",
    "ump_test",
]
