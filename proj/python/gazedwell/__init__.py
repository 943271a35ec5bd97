"""Probabilistic variable dwell-time gaze selection.

Layouts are passed as dicts (or JSON text) of the form
``{"screen": [w, h], "links": [{"id", "left", "top", "width", "height"}, ...]}``.
Trial corpora are JSON-lines text as written by ``synth``.
"""

import json

from . import _gazedwell
from ._gazedwell import (
    PROTOCOL_VERSION,
    SAMPLE_PERIOD_MS,
    FormatError,
    GatewaySession,
    assign_dwells,
    box_distance,
    fixture_params,
    nominal_dwell,
    segment,
    synth,
)

__all__ = [
    "PROTOCOL_VERSION",
    "SAMPLE_PERIOD_MS",
    "FormatError",
    "GatewaySession",
    "assign_dwells",
    "assign_gaze",
    "box_distance",
    "fixture_params",
    "forward_posterior",
    "grid",
    "infer",
    "last_fixated_baseline",
    "nominal_dwell",
    "segment",
    "simulate",
    "synth",
]


def _layout_text(layout):
    return layout if isinstance(layout, str) else json.dumps(layout)


def _fixation_rows(fixations):
    rows = []
    for f in fixations:
        if isinstance(f, dict):
            rows.append((f["x"], f["y"], f["duration_ms"]))
        else:
            rows.append(tuple(f))
    return rows


def assign_gaze(x, y, layout, threshold=40.0):
    return _gazedwell.assign_gaze(x, y, _layout_text(layout), threshold)


def forward_posterior(fixations, layout, params=None, window=5):
    return _gazedwell.forward_posterior(_fixation_rows(fixations), _layout_text(layout), params, window)


def infer(points, layout, params=None):
    return _gazedwell.infer([tuple(p) for p in points], _layout_text(layout), params)


def last_fixated_baseline(fixations, layout):
    return _gazedwell.last_fixated_baseline(_fixation_rows(fixations), _layout_text(layout))


def simulate(trials, policy, quantize="per-sample", params=None):
    return _gazedwell.simulate(trials, tuple(policy), quantize, params)


def grid(trials, time_stride=1, p_step=0.1, threads=0, quantize="per-sample", params=None):
    return _gazedwell.grid(trials, time_stride, p_step, threads, quantize, params)
