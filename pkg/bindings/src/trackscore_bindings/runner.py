"""Subprocess plumbing and report objects."""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

_EXIT_VALIDATION = 1
_EXIT_IO = 2
_EXIT_USAGE = 64


class BindingError(RuntimeError):
    """The evaluator CLI failed in a way the bindings cannot translate."""


def _cli_command() -> list[str]:
    """Locate the evaluator CLI.

    Prefers the installed console script; falls back to module execution
    under the current interpreter so editable installs work too.
    """
    exe = shutil.which("trackscore")
    if exe:
        return [exe]
    return [sys.executable, "-m", "trackscore.cli"]


def _run(args: Sequence[str]) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        _cli_command() + list(args), capture_output=True, text=True
    )
    if proc.returncode == 0:
        return proc
    message = proc.stderr.strip() or proc.stdout.strip() or "no output"
    if proc.returncode == _EXIT_IO:
        raise FileNotFoundError(message)
    if proc.returncode == _EXIT_VALIDATION:
        raise ValueError(message)
    if proc.returncode == _EXIT_USAGE:
        raise BindingError(f"usage error talking to the evaluator: {message}")
    raise BindingError(
        f"evaluator exited with status {proc.returncode}: {message}"
    )


@dataclass(frozen=True)
class BoundReport:
    """Parsed evaluation report.

    `sequences` maps sequence name to its flat metric dict; `pooled` holds
    the benchmark-level values; `curves` the per-threshold tables.
    """

    alphas: tuple[float, ...]
    non_canonical: bool
    sequences: dict[str, dict[str, float]]
    pooled: dict[str, float]
    curves: dict[str, list[float]]
    raw: dict = field(repr=False, default_factory=dict)

    @staticmethod
    def from_json(payload: dict) -> "BoundReport":
        for key in ("alphas", "sequences", "pooled", "curves"):
            if key not in payload:
                raise BindingError(f"evaluator report is missing {key!r}")
        return BoundReport(
            alphas=tuple(payload["alphas"]),
            non_canonical=bool(payload.get("non_canonical", False)),
            sequences=payload["sequences"],
            pooled=payload["pooled"],
            curves=payload["curves"],
            raw=payload,
        )


@dataclass(frozen=True)
class ScenarioPaths:
    gt_dir: Path
    results_dir: Path
    seqmap: Path


def evaluate(
    gt_dir: str | os.PathLike,
    results_dir: str | os.PathLike,
    seqmap: str | os.PathLike,
    metrics: Sequence[str] | None = None,
    alphas: Sequence[float] | None = None,
    jobs: int | None = None,
) -> BoundReport:
    """Run an evaluation and return the parsed report.

    Raises FileNotFoundError for missing inputs and ValueError for inputs
    the evaluator rejects.
    """
    with tempfile.TemporaryDirectory(prefix="trackscore_bindings_") as tmp:
        out = Path(tmp) / "report.json"
        args = [
            "eval",
            "--gt", str(gt_dir),
            "--results", str(results_dir),
            "--seqmap", str(seqmap),
            "--format", "json",
            "--out", str(out),
        ]
        if metrics is not None:
            args += ["--metrics", ",".join(metrics)]
        if alphas is not None:
            args += ["--alpha", ",".join(repr(a) for a in alphas)]
        if jobs is not None:
            args += ["--jobs", str(jobs)]
        _run(args)
        try:
            payload = json.loads(out.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BindingError(f"unreadable evaluator report: {exc}") from exc
    return BoundReport.from_json(payload)


def generate_scenario(
    name: str,
    out_dir: str | os.PathLike,
    params: Mapping[str, object] | None = None,
) -> ScenarioPaths:
    """Write a synthetic fixture benchmark and return its file locations."""
    args = ["scenarios", "--name", name, "--out", str(out_dir)]
    for key, value in (params or {}).items():
        args += ["--param", f"{key}={value}"]
    _run(args)
    out = Path(out_dir)
    return ScenarioPaths(
        gt_dir=out / "gt",
        results_dir=out / "results",
        seqmap=out / "seqmap.txt",
    )


def oracle_check(trials: int = 50, seed: int = 0) -> str:
    """Run the evaluator's randomized self-check; returns its summary line."""
    proc = _run(["oracle-check", "--trials", str(trials), "--seed", str(seed)])
    return proc.stdout.strip()
