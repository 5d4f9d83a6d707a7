"""IMEX Runge-Kutta integration with adjoint-based error estimates."""

import json

from . import _core
from ._core import Error, StageError, builtin_names, table_ids

__all__ = [
    "Error",
    "StageError",
    "builtin_names",
    "table_ids",
    "tableau",
    "validate_tableau",
    "run",
    "reproduce_table",
    "table_csv",
    "convergence_study",
    "solve_forward",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def tableau(name):
    """Builtin tableau pair as a dict."""
    return json.loads(_core.dump_tableau(name))


def validate_tableau(pair):
    """Validation report (ok, violations, warnings) for a tableau dict or JSON text."""
    return _core.validate_tableau(_text(pair))


def run(config):
    """Run one experiment from a config dict or JSON text; returns the report dict."""
    return json.loads(_core.run(_text(config)))


def reproduce_table(table_id, threads=0):
    """Report dicts for the three rows of a published table."""
    return json.loads(_core.reproduce_table(table_id, threads))


def table_csv(table_id, threads=0):
    return _core.table_csv(table_id, threads)


def convergence_study(config, levels):
    """List of {k, error, order} dicts under step halving."""
    return _core.convergence_study(_text(config), levels)


def solve_forward(config):
    """Dict with times, states (nodes x components array) and Newton iterations."""
    return _core.solve_forward(_text(config))
