"""Evolutionary Pareto set learning: problems, metrics and training from Python."""

import json

from ._epsl import (
    EpslError,
    cli,
    das_dennis,
    evaluate,
    hypervolume,
    igd_plus,
    nondominated,
    problem_info,
    problem_names,
)
from . import _epsl

__all__ = [
    "EpslError",
    "cli",
    "das_dennis",
    "default_config",
    "evaluate",
    "hypervolume",
    "igd_plus",
    "nondominated",
    "problem_info",
    "problem_names",
    "run",
]


def default_config():
    """Default run config as a dict."""
    return json.loads(_epsl.default_config_json())


def run(config=None, **overrides):
    """Train (or run the baseline) and return the run artifact as a dict.

    `overrides` are merged into the top level of the config, e.g.
    run(problem="RE21", train={...}).
    """
    cfg = default_config()
    if config:
        cfg.update(config)
    cfg.update(overrides)
    return json.loads(_epsl.run_json(json.dumps(cfg)))
