"""Aerosol channel and receiver models (Python bindings)."""

import json
import os

from ._aerochan import (  # noqa: F401
    AerochanError,
    Channel,
    ConfigError,
    DomainError,
    IoError,
    NumericError,
    __version__,
    breath_response,
    eta,
    frequency_response,
    impulse_response,
    ml_threshold,
    normalize_scenario,
    pmd_consistent,
    pmd_paper,
    q_function,
    scenario_schema,
    steady_state,
)
from ._aerochan import run as _run


def _scenario_text(scenario):
    if scenario is None:
        return ""
    if isinstance(scenario, dict):
        return json.dumps(scenario)
    if isinstance(scenario, (str, os.PathLike)) and os.path.exists(scenario):
        with open(scenario, encoding="utf-8") as fh:
            return fh.read()
    if isinstance(scenario, str):
        return scenario
    raise TypeError("scenario must be a dict, a JSON string or a path")


def run(command, scenario=None, overrides=()):
    """Run an experiment and return {"metadata", "columns", "rows"}.

    `scenario` is a dict, a JSON string or a file path; `overrides` are
    "dotted.path=value" strings as accepted by the command-line tool.
    """
    return _run(command, _scenario_text(scenario), list(overrides))


def schema():
    return json.loads(scenario_schema())
