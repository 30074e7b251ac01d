"""Domain types for detections, sequences and detection-level similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class InvalidGeometryError(ValueError):
    """Raised for non-finite or degenerate detection geometry."""


class FormatError(ValueError):
    """Raised for structurally invalid sequences or input records."""


@dataclass(frozen=True)
class Box2D:
    """Axis-aligned 2D bounding box in (left, top, width, height) form.

    Width and height must be strictly positive; degenerate boxes are
    rejected at construction so data errors surface early instead of
    silently scoring as zero overlap.
    """

    left: float
    top: float
    width: float
    height: float

    def __post_init__(self) -> None:
        vals = (self.left, self.top, self.width, self.height)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidGeometryError(f"non-finite box coordinates: {vals}")
        if self.width <= 0 or self.height <= 0:
            raise InvalidGeometryError(
                f"box extents must be positive, got w={self.width} h={self.height}"
            )

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Point2D:
    """Point location in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidGeometryError(f"non-finite point: ({self.x}, {self.y})")


Geometry = Box2D | Point2D


@dataclass(frozen=True)
class Detection:
    """One timestamped, identified, localized observation (gt or prediction)."""

    frame: int
    id: int
    geometry: Geometry
    class_id: int = -1
    confidence: float = 1.0
    consider: bool = True
    visibility: float = -1.0

    def __post_init__(self) -> None:
        if self.frame < 1:
            raise FormatError(f"frame must be >= 1, got {self.frame}")
        if self.id < 0:
            raise FormatError(f"id must be non-negative, got {self.id}")


@dataclass(frozen=True)
class SequencePair:
    """Aligned ground-truth and predicted detection sets for one video.

    Ground-truth rows with consider=False are expected to be dropped by the
    loader before a SequencePair is built.  Within one side of one frame,
    ids must be unique.
    """

    name: str
    num_frames: int
    gt: tuple[Detection, ...] = field(default_factory=tuple)
    pr: tuple[Detection, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gt", tuple(self.gt))
        object.__setattr__(self, "pr", tuple(self.pr))
        for side_name, dets in (("gt", self.gt), ("pr", self.pr)):
            seen: set[tuple[int, int]] = set()
            for d in dets:
                if d.frame > self.num_frames:
                    raise FormatError(
                        f"{side_name} detection at frame {d.frame} exceeds "
                        f"num_frames={self.num_frames} in {self.name!r}"
                    )
                key = (d.frame, d.id)
                if key in seen:
                    raise FormatError(
                        f"duplicate {side_name} id {d.id} in frame {d.frame} "
                        f"of {self.name!r}"
                    )
                seen.add(key)

    def gt_by_frame(self) -> list[list[Detection]]:
        return _bucket_by_frame(self.gt, self.num_frames)

    def pr_by_frame(self) -> list[list[Detection]]:
        return _bucket_by_frame(self.pr, self.num_frames)


def _bucket_by_frame(dets: tuple[Detection, ...], num_frames: int) -> list[list[Detection]]:
    """Detections per frame (index 0 = frame 1), ordered by id within a frame."""
    frames: list[list[Detection]] = [[] for _ in range(num_frames)]
    for d in dets:
        frames[d.frame - 1].append(d)
    for bucket in frames:
        bucket.sort(key=lambda d: d.id)
    return frames


def iou_box(a: Box2D, b: Box2D) -> float:
    """Spatial intersection over union of two boxes, in [0, 1]."""
    ix = min(a.left + a.width, b.left + b.width) - max(a.left, b.left)
    iy = min(a.top + a.height, b.top + b.height) - max(a.top, b.top)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


def similarity_point(a: Point2D, b: Point2D) -> float:
    """One minus euclidean distance in meters, clamped to [0, 1].

    Points further than one meter apart have zero similarity.
    """
    dist = math.hypot(a.x - b.x, a.y - b.y)
    return max(0.0, 1.0 - dist)


def similarity(a: Geometry, b: Geometry) -> float:
    if isinstance(a, Box2D) and isinstance(b, Box2D):
        return iou_box(a, b)
    if isinstance(a, Point2D) and isinstance(b, Point2D):
        return similarity_point(a, b)
    raise FormatError(
        f"mixed geometry variants: {type(a).__name__} vs {type(b).__name__}"
    )


def build_similarity(seq: SequencePair) -> list[np.ndarray]:
    """Per-frame similarity matrices S[i][j] over gt rows and pr columns.

    Frames with no gt or no pr produce empty matrices of the right shape.
    A sequence must use a single geometry variant uniformly.
    """
    variants = {type(d.geometry) for d in seq.gt} | {type(d.geometry) for d in seq.pr}
    if len(variants) > 1:
        raise FormatError(f"mixed geometry variants in sequence {seq.name!r}")
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    tensor: list[np.ndarray] = []
    for gts, prs in zip(gt_frames, pr_frames):
        mat = np.zeros((len(gts), len(prs)))
        for i, g in enumerate(gts):
            for j, p in enumerate(prs):
                mat[i, j] = similarity(g.geometry, p.geometry)
        tensor.append(mat)
    return tensor
