"""Sparse trigonometric approximation: greedy algorithms, hyperbolic crosses and sparse grids."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import preset_json as _preset_json
from ._core import run_json as _run_json

__version__ = "0.1.0"


def preset(name):
    """Built-in experiment config as a dict."""
    return _json.loads(_preset_json(name))


def run_experiment(config):
    """Run a config dict (or preset name). Returns (csv_text, summary_dict, exit_code)."""
    if isinstance(config, str):
        config = preset(config)
    out = _run_json(_json.dumps(config))
    return out["csv"], _json.loads(out["summary"]), out["exit_code"]
