"""Deterministic synthetic tracking scenarios.

Every scenario places unit-sized boxes at exact-overlap or zero-overlap
positions so per-detection similarity is always 0 or 1, which keeps the
resulting scores threshold independent and checkable by hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .model import Box2D, Detection, SequencePair

_SIZE = 10.0
_SPACING = 100.0


class UnknownScenarioError(KeyError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict[str, object]
    seq: SequencePair


def _box(slot: int) -> Box2D:
    return Box2D(_SPACING * slot, 0.0, _SIZE, _SIZE)


def _det(frame: int, det_id: int, slot: int) -> Detection:
    return Detection(frame=frame, id=det_id, geometry=_box(slot))


def _span(det_id: int, frames: range, slot: int) -> list[Detection]:
    return [_det(f, det_id, slot) for f in frames]


def _frame_rate(k: int = 10) -> SequencePair:
    """One object tracked perfectly except for a single identity switch at
    the midpoint.  MOTA depends on k, HOTA does not."""
    k = int(k)
    if k < 2 or k % 2:
        raise ValueError(f"frame_rate needs an even k >= 2, got {k}")
    half = k // 2
    gt = _span(1, range(1, k + 1), 0)
    pr = _span(1, range(1, half + 1), 0) + _span(2, range(half + 1, k + 1), 0)
    return SequencePair("frame_rate", k, tuple(gt), tuple(pr))


def _drifting_track() -> SequencePair:
    """One gt track of 8 frames; the prediction covers the first 5 frames
    and then drifts off for 4 more, giving the matched TPs 5 TPAs, 3 FNAs
    and 4 FPAs."""
    gt = _span(1, range(1, 9), 0)
    pr = _span(1, range(1, 6), 0) + _span(1, range(9, 13), 1)
    return SequencePair("drifting_track", 12, tuple(gt), tuple(pr))


def _self_correct(variant: str = "A") -> SequencePair:
    """12-frame single object; the tracker loses the identity and either
    recovers it (A), never loses more than once (B), or never recovers
    (C)."""
    frames = range(1, 13)
    gt = _span(1, frames, 0)
    if variant == "A":
        pr = (_span(1, range(1, 5), 0) + _span(2, range(5, 9), 0)
              + _span(1, range(9, 13), 0))
    elif variant == "B":
        pr = _span(1, range(1, 7), 0) + _span(2, range(7, 13), 0)
    elif variant == "C":
        pr = (_span(1, range(1, 5), 0) + _span(2, range(5, 9), 0)
              + _span(3, range(9, 13), 0))
    else:
        raise ValueError(f"self_correct variant must be A, B or C, got {variant!r}")
    return SequencePair(f"self_correct_{variant}", 12, tuple(gt), tuple(pr))


def _alignment(variant: str = "A") -> SequencePair:
    """6-frame single object split between two predicted ids at 3+3 (A),
    4+2 (B) or 5+1 (C); all have one switch, association alignment grows
    from A to C."""
    splits = {"A": 3, "B": 4, "C": 5}
    if variant not in splits:
        raise ValueError(f"alignment variant must be A, B or C, got {variant!r}")
    a = splits[variant]
    gt = _span(1, range(1, 7), 0)
    pr = _span(1, range(1, a + 1), 0) + _span(2, range(a + 1, 7), 0)
    return SequencePair(f"alignment_{variant}", 6, tuple(gt), tuple(pr))


def _fragmentation(variant: str = "A") -> SequencePair:
    """8-frame single object with equal association but different temporal
    fragmentation: two contiguous halves (A), two interleaved ids (B),
    four short ids (C)."""
    gt = _span(1, range(1, 9), 0)
    if variant == "A":
        pr = _span(1, range(1, 5), 0) + _span(2, range(5, 9), 0)
    elif variant == "B":
        pr = ([_det(f, 1, 0) for f in (1, 2, 5, 6)]
              + [_det(f, 2, 0) for f in (3, 4, 7, 8)])
    elif variant == "C":
        pr = (_span(1, range(1, 3), 0) + _span(2, range(3, 5), 0)
              + _span(3, range(5, 7), 0) + _span(4, range(7, 9), 0))
    else:
        raise ValueError(f"fragmentation variant must be A, B or C, got {variant!r}")
    return SequencePair(f"fragmentation_{variant}", 8, tuple(gt), tuple(pr))


def _detection_decrease(variant: str = "half") -> SequencePair:
    """16-frame single object.  `half` detects only the first half under
    one id; `full` adds the second half under a new id."""
    gt = _span(1, range(1, 17), 0)
    if variant == "half":
        pr = _span(1, range(1, 9), 0)
    elif variant == "full":
        pr = _span(1, range(1, 9), 0) + _span(2, range(9, 17), 0)
    else:
        raise ValueError(
            f"detection_decrease variant must be half or full, got {variant!r}"
        )
    return SequencePair(f"detection_decrease_{variant}", 16, tuple(gt), tuple(pr))


def _association_ignored(m: int = 1) -> SequencePair:
    """16-frame single object; first half under one id, second half split
    evenly over m extra ids."""
    m = int(m)
    if m < 1 or 8 % m:
        raise ValueError(f"association_ignored needs m dividing 8, got {m}")
    gt = _span(1, range(1, 17), 0)
    pr = _span(1, range(1, 9), 0)
    run = 8 // m
    for i in range(m):
        start = 9 + i * run
        pr += _span(2 + i, range(start, start + run), 0)
    return SequencePair(f"association_ignored_{m}", 16, tuple(gt), tuple(pr))


def _two_frame_split() -> SequencePair:
    """One object over two frames, predicted as two single-frame ids."""
    gt = _span(1, range(1, 3), 0)
    pr = [_det(1, 1, 0), _det(2, 2, 0)]
    return SequencePair("two_frame_split", 2, tuple(gt), tuple(pr))


def _two_frame_merge() -> SequencePair:
    """Two one-frame objects joined by a single predicted id."""
    gt = [_det(1, 1, 0), _det(2, 2, 1)]
    pr = [_det(1, 1, 0), _det(2, 1, 1)]
    return SequencePair("two_frame_merge", 2, tuple(gt), tuple(pr))


def _coverage_monotonic(ratio: float = 0.5, variant: str = "A") -> SequencePair:
    """20-frame single object.  Variant B covers only the first
    ratio-fraction with one id; variant A additionally covers the rest
    under a second id, so A has strictly better detection."""
    length = 20
    ratio = float(ratio)
    split = round(ratio * length)
    if not (0 < split < length) or abs(split - ratio * length) > 1e-9:
        raise ValueError(
            f"ratio must be a multiple of {1 / length} strictly inside (0, 1), "
            f"got {ratio}"
        )
    gt = _span(1, range(1, length + 1), 0)
    pr = _span(1, range(1, split + 1), 0)
    if variant == "A":
        pr += _span(2, range(split + 1, length + 1), 0)
    elif variant != "B":
        raise ValueError(f"coverage_monotonic variant must be A or B, got {variant!r}")
    return SequencePair(f"coverage_monotonic_{variant}_{split}", length, tuple(gt), tuple(pr))


_REGISTRY: dict[str, Callable[..., SequencePair]] = {
    "frame_rate": _frame_rate,
    "drifting_track": _drifting_track,
    "self_correct": _self_correct,
    "alignment": _alignment,
    "fragmentation": _fragmentation,
    "detection_decrease": _detection_decrease,
    "association_ignored": _association_ignored,
    "two_frame_split": _two_frame_split,
    "two_frame_merge": _two_frame_merge,
    "coverage_monotonic": _coverage_monotonic,
}


def scenario_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def scenario(name: str, **params: object) -> Scenario:
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; known: {', '.join(scenario_names())}"
        ) from None
    seq = builder(**params)
    return Scenario(name=name, params=dict(params), seq=seq)
