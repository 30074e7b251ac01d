"""MOTChallenge text ingestion, sidecar parsers, and file emission.

Line grammar (comma separated):
    frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,visibility
For ground truth, field 7 is the consider flag (0 drops the row); for
predictions it is the confidence (absent or -1 means 1.0) and fields 8-9
are ignored.  At least 6 fields are required; fields beyond 9 are ignored.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .extensions import ClassProbs, FederationMask
from .model import Box2D, Detection, FormatError, SequencePair


class ParseError(FormatError):
    """Malformed input line; the message carries the file and line number."""


def _numbers(line: str, path: str, lineno: int) -> list[float]:
    parts = line.split(",")
    if len(parts) < 6:
        raise ParseError(f"{path}:{lineno}: expected at least 6 fields, got {len(parts)}")
    vals = []
    for p in parts[:9]:
        try:
            vals.append(float(p))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: malformed numeric field {p!r}") from None
    return vals


def _int_field(value: float, name: str, path: str, lineno: int) -> int:
    if value != int(value):
        raise ParseError(f"{path}:{lineno}: {name} must be an integer, got {value}")
    return int(value)


def parse_mot_file(path: str | os.PathLike, side: str) -> tuple[Detection, ...]:
    if side not in ("gt", "pred"):
        raise ValueError(f"side must be 'gt' or 'pred', got {side!r}")
    dets: list[Detection] = []
    seen: set[tuple[int, int]] = set()
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        vals = _numbers(line, str(path), lineno)
        frame = _int_field(vals[0], "frame", str(path), lineno)
        det_id = _int_field(vals[1], "id", str(path), lineno)
        if frame < 1:
            raise ParseError(f"{str(path)}:{lineno}: frame must be >= 1, got {frame}")
        if det_id < 1:
            raise ParseError(f"{str(path)}:{lineno}: id must be >= 1, got {det_id}")
        field7 = vals[6] if len(vals) > 6 else (1.0 if side == "gt" else -1.0)
        if side == "gt":
            if field7 == 0:
                continue
            class_id = _int_field(vals[7], "class", str(path), lineno) if len(vals) > 7 else -1
            visibility = vals[8] if len(vals) > 8 else -1.0
            confidence = 1.0
        else:
            confidence = 1.0 if field7 == -1.0 else field7
            class_id = -1
            visibility = -1.0
        key = (frame, det_id)
        if key in seen:
            raise FormatError(
                f"{str(path)}:{lineno}: duplicate id {det_id} in frame {frame}"
            )
        seen.add(key)
        dets.append(Detection(
            frame=frame,
            id=det_id,
            geometry=Box2D(vals[2], vals[3], vals[4], vals[5]),
            class_id=class_id,
            confidence=confidence,
            consider=True,
            visibility=visibility,
        ))
    return tuple(dets)


def format_detection(d: Detection, side: str) -> str:
    if not isinstance(d.geometry, Box2D):
        raise FormatError("only box detections can be serialized to MOT lines")
    b = d.geometry
    field7 = 1 if side == "gt" else d.confidence
    cls = d.class_id if side == "gt" else -1
    vis = d.visibility if side == "gt" else -1
    return (f"{d.frame},{d.id},{b.left:g},{b.top:g},{b.width:g},{b.height:g},"
            f"{field7:g},{cls:g},{vis:g}")


def write_mot_file(path: str | os.PathLike, dets: tuple[Detection, ...], side: str) -> None:
    lines = [format_detection(d, side) for d in sorted(dets, key=lambda d: (d.frame, d.id))]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def parse_class_probs(path: str | os.PathLike) -> ClassProbs:
    """Sidecar grammar, one record per line: frame,id,class:prob[;class:prob]..."""
    probs: dict[tuple[int, int], dict[int, float]] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"{str(path)}:{lineno}: expected frame,id,class:prob list")
        try:
            frame = int(parts[0])
            det_id = int(parts[1])
            vec: dict[int, float] = {}
            for item in parts[2].split(";"):
                cls_s, prob_s = item.split(":")
                vec[int(cls_s)] = float(prob_s)
        except ValueError:
            raise ParseError(f"{str(path)}:{lineno}: malformed record") from None
        total = sum(vec.values())
        if abs(total - 1.0) > 1e-9:
            raise FormatError(
                f"{str(path)}:{lineno}: probabilities sum to {total}, expected 1"
            )
        probs[(frame, det_id)] = vec
    return ClassProbs(probs)


def parse_federation_mask(path: str | os.PathLike) -> FederationMask:
    """One record per line: frame,class[;class]... listing evaluable classes."""
    evaluable: dict[int, frozenset[int]] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{str(path)}:{lineno}: expected frame,class list")
        try:
            frame = int(parts[0])
            classes = frozenset(int(c) for c in parts[1].split(";") if c)
        except ValueError:
            raise ParseError(f"{str(path)}:{lineno}: malformed record") from None
        evaluable[frame] = classes
    return FederationMask(evaluable)


@dataclass(frozen=True)
class SeqMapEntry:
    name: str
    gt_path: Path
    results_path: Path
    num_frames: int | None = None


def load_seqmap(path: str | os.PathLike, gt_dir: str | os.PathLike,
                results_dir: str | os.PathLike) -> list[SeqMapEntry]:
    """Seqmap lines: `name[,num_frames]`; files live at <dir>/<name>.txt."""
    entries: list[SeqMapEntry] = []
    seen: set[str] = set()
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        name = parts[0]
        if name in seen:
            raise FormatError(f"{str(path)}:{lineno}: duplicate sequence name {name!r}")
        seen.add(name)
        num_frames = None
        if len(parts) > 1 and parts[1]:
            try:
                num_frames = int(parts[1])
            except ValueError:
                raise ParseError(
                    f"{str(path)}:{lineno}: malformed frame count {parts[1]!r}"
                ) from None
        entries.append(SeqMapEntry(
            name=name,
            gt_path=Path(gt_dir) / f"{name}.txt",
            results_path=Path(results_dir) / f"{name}.txt",
            num_frames=num_frames,
        ))
    return entries


def load_sequence(entry: SeqMapEntry) -> SequencePair:
    gt = parse_mot_file(entry.gt_path, "gt")
    pr = parse_mot_file(entry.results_path, "pred")
    num_frames = entry.num_frames
    if num_frames is None:
        num_frames = max((d.frame for d in gt + pr), default=0)
    return SequencePair(entry.name, num_frames, gt, pr)
