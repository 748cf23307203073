"""Functional multi-armed bandit allocators, rates and experiments."""

import json
from pathlib import Path

from ._core import (
    FmabError,
    RateFunction,
    RateKind,
    allocation_infimum,
    bfi_budget_bound,
    experiment_names,
    fmab_upper_bound,
    fmab_upper_bound_explicit,
    sha256_hex,
)
from . import _core

__all__ = [
    "FmabError",
    "RateFunction",
    "RateKind",
    "allocation_infimum",
    "bfi_budget_bound",
    "bounds",
    "compare",
    "experiment_names",
    "fmab_upper_bound",
    "fmab_upper_bound_explicit",
    "load_config",
    "run",
    "sha256_hex",
]


def _text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(_text(v) for v in value)
    return str(value)


def _normalize(config):
    return {str(k): _text(v) for k, v in config.items()}


def load_config(path):
    """Parse a key = value config file into a dict of strings."""
    return _core.parse_config(Path(path).read_text())


def run(config, **overrides):
    """Run an experiment; returns summary, manifest and trace CSV texts."""
    merged = {**config, **overrides}
    return json.loads(_core.run_experiment(_normalize(merged)))


def bounds(config, **overrides):
    return json.loads(_core.bounds_report(_normalize({**config, **overrides})))


def compare(config, **overrides):
    merged = {"experiment": "baseline_compare", **config, **overrides}
    return json.loads(_core.compare_allocators(_normalize(merged)))
