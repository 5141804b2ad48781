"""Short-path spectral laboratory.

Configs are plain dicts in the JSON layout of docs/config.md.
"""

import json

from . import _core
from ._core import (
    CSV_HEADER,
    CapacityError,
    ConvergenceError,
    SplabError,
    ValidationError,
    b_star_log_sobolev,
    b_star_poincare,
    fit_power_law,
    g_eta,
    predicted_exponent,
)

__all__ = [
    "CSV_HEADER",
    "CapacityError",
    "ConvergenceError",
    "SplabError",
    "ValidationError",
    "b_star_log_sobolev",
    "b_star_poincare",
    "fit_csv",
    "fit_power_law",
    "g_eta",
    "generate_graph",
    "phase_b",
    "predicted_exponent",
    "run",
    "solve",
    "verify",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def _with_n(config, n):
    if isinstance(config, str):
        config = json.loads(config)
    if "n" not in config:
        config = {**config, "n": [n]}
    return _text(config)


def generate_graph(config, n, instance=0):
    return _core.generate_graph(_with_n(config, n), n, instance)


def solve(config, n, instance=0, b=0.0, conditions=False):
    return _core.solve(_with_n(config, n), n, instance, b, conditions)


def phase_b(config, n, instance=0, threshold=0.99):
    return _core.phase_b(_with_n(config, n), n, instance, threshold)


def run(config):
    """Runs an ensemble. Returns (csv text, list of (n, instance, reason))."""
    return _core.run(_text(config))


def fit_csv(csv_text, response="inverse-overlap-opt"):
    return _core.fit_csv(csv_text, response)


def verify(full=False):
    return json.loads(_core.verify(full))
