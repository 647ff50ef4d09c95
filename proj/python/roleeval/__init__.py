"""Python bindings for the roleeval harness."""

import json

from ._roleeval import (
    RoleevalError,
    aggregate_overall,
    cache_key,
    control_model_select,
    instruction_bias_disparity,
    length_bias_correlation,
    normalize_response,
    parse_judge_output,
    round_display,
    run_pipeline,
    wilson_interval,
)
from . import _roleeval

__all__ = [
    "RoleevalError",
    "aggregate_overall",
    "cache_key",
    "control_model_select",
    "instruction_bias_disparity",
    "length_bias_correlation",
    "normalize_response",
    "parse_judge_output",
    "render_background",
    "round_display",
    "run_pipeline",
    "success_rate",
    "validate_profile",
    "wilson_interval",
]


def validate_profile(profile):
    """Returns a list of (code, key, message) violations; empty when valid."""
    return _roleeval.validate_profile_json(json.dumps(profile))


def render_background(profile):
    return _roleeval.render_background_json(json.dumps(profile))


def success_rate(records, baseline_order=()):
    """Baseline x category table from verdict-log records, as a dict."""
    return json.loads(_roleeval.success_rate_json(json.dumps(records), list(baseline_order)))
