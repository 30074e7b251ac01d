"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .hota import CANONICAL_ALPHAS
from .io_mot import (
    load_seqmap,
    load_sequence,
    parse_class_probs,
    parse_federation_mask,
    write_mot_file,
)
from .model import FormatError
from .oracle import oracle_check
from .report import DEFAULT_METRICS, build_report, emit_report
from .scenarios import UnknownScenarioError, scenario, scenario_names

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="trackscore", description="Tracking evaluation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate tracker results against ground truth")
    ev.add_argument("--gt", required=True, help="directory with <name>.txt gt files")
    ev.add_argument("--results", required=True, help="directory with <name>.txt results")
    ev.add_argument("--seqmap", required=True, help="file listing sequence names")
    ev.add_argument("--metrics", default=",".join(DEFAULT_METRICS))
    ev.add_argument("--alpha", default=None,
                    help="comma-separated threshold grid overriding the canonical 19")
    ev.add_argument("--classes", action="store_true",
                    help="include per-class detection counts")
    ev.add_argument("--class-probs", default=None,
                    help="sidecar file with per-prediction class probabilities")
    ev.add_argument("--fed-mask", default=None,
                    help="sidecar file with per-frame evaluable classes")
    ev.add_argument("--out", default=None)
    ev.add_argument("--format", default="json", choices=("json", "csv"))
    ev.add_argument("--jobs", type=int, default=None)

    sw = sub.add_parser("sweep", help="emit per-threshold curve tables")
    for a in ("--gt", "--results", "--seqmap"):
        sw.add_argument(a, required=True)
    sw.add_argument("--out", default=None)
    sw.add_argument("--format", default="json", choices=("json", "csv"))
    sw.add_argument("--jobs", type=int, default=None)

    sc = sub.add_parser("scenarios", help="write synthetic fixture files")
    sc.add_argument("--name", required=True,
                    help=f"one of: {', '.join(scenario_names())}")
    sc.add_argument("--param", action="append", default=[], metavar="K=V")
    sc.add_argument("--out", required=True)

    oc = sub.add_parser("oracle-check", help="randomized exhaustive-matching check")
    oc.add_argument("--trials", type=int, default=200)
    oc.add_argument("--seed", type=int, default=0)
    return parser


def _parse_params(items: list[str]) -> dict:
    params: dict = {}
    for item in items:
        if "=" not in item:
            raise _UsageError(f"--param needs K=V, got {item!r}")
        key, _, value = item.partition("=")
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                params[key] = value
    return params


def _jobs(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("TRACKSCORE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise FormatError(f"TRACKSCORE_JOBS must be an integer, got {env!r}")
    return 1


def _alpha_grid(flag: str | None) -> tuple[float, ...]:
    if flag is None:
        return CANONICAL_ALPHAS
    try:
        grid = tuple(float(v) for v in flag.split(","))
    except ValueError:
        raise FormatError(f"malformed --alpha grid {flag!r}")
    if not grid or not all(0.0 < a < 1.0 for a in grid):
        raise FormatError("--alpha values must lie strictly between 0 and 1")
    return grid


def _write_out(payload: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(payload)


def _cmd_eval(args) -> int:
    entries = load_seqmap(args.seqmap, args.gt, args.results)
    seqs = [load_sequence(e) for e in entries]
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    class_probs = parse_class_probs(args.class_probs) if args.class_probs else None
    fed_mask = parse_federation_mask(args.fed_mask) if args.fed_mask else None
    report = build_report(
        seqs,
        alphas=_alpha_grid(args.alpha),
        metrics=metrics,
        jobs=_jobs(args.jobs),
        class_probs=class_probs,
        fed_mask=fed_mask,
    )
    if args.classes:
        by_class: dict[str, dict[str, int]] = {}
        for seq in seqs:
            for d in seq.gt:
                c = by_class.setdefault(str(d.class_id), {"gt": 0, "pred": 0})
                c["gt"] += 1
            for d in seq.pr:
                c = by_class.setdefault(str(d.class_id), {"gt": 0, "pred": 0})
                c["pred"] += 1
        report["classes"] = dict(sorted(by_class.items()))
    _write_out(emit_report(report, args.format), args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    entries = load_seqmap(args.seqmap, args.gt, args.results)
    seqs = [load_sequence(e) for e in entries]
    report = build_report(seqs, metrics=("hota",), jobs=_jobs(args.jobs))
    if args.format == "csv":
        payload = emit_report(
            {"sequences": {}, "pooled": {}, "curves": report["curves"]}, "csv"
        )
    else:
        payload = (json.dumps({"pooled": report["curves"]}, indent=2) + "\n").encode()
    _write_out(payload, args.out)
    return EXIT_OK


def _cmd_scenarios(args) -> int:
    scn = scenario(args.name, **_parse_params(args.param))
    out_dir = Path(args.out)
    (out_dir / "gt").mkdir(parents=True, exist_ok=True)
    (out_dir / "results").mkdir(parents=True, exist_ok=True)
    name = scn.seq.name
    write_mot_file(out_dir / "gt" / f"{name}.txt", scn.seq.gt, "gt")
    write_mot_file(out_dir / "results" / f"{name}.txt", scn.seq.pr, "pred")
    (out_dir / "seqmap.txt").write_text(f"{name},{scn.seq.num_frames}\n")
    print(f"wrote scenario {name!r} to {out_dir}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    rep = oracle_check(trials=args.trials, seed=args.seed)
    print(f"trials={rep.trials} alphas={list(rep.alphas)} "
          f"max_abs_diff={rep.max_abs_diff:.3e} elapsed={rep.elapsed_seconds:.2f}s")
    return EXIT_OK if rep.ok else EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "scenarios":
            return _cmd_scenarios(args)
        return _cmd_oracle_check(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnknownScenarioError, FormatError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
