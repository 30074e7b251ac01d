"""Thin bindings around the `trackscore` command-line evaluator.

Everything here talks to the evaluator through its public surface only:
the CLI and its file formats.  The evaluator package is never imported, so
these bindings work against any installed `trackscore`, not a particular
code revision.
"""

from .runner import (
    BindingError,
    BoundReport,
    ScenarioPaths,
    evaluate,
    generate_scenario,
    oracle_check,
)

__version__ = "0.1.0"

__all__ = [
    "BindingError",
    "BoundReport",
    "ScenarioPaths",
    "evaluate",
    "generate_scenario",
    "oracle_check",
]
