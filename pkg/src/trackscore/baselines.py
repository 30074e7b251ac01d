"""Reference baseline metrics: CLEAR MOT (MOTA/MOTP/MODA), IDF1, Track-mAP."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .assignment import solve_max
from .model import Box2D, Detection, FormatError, SequencePair, similarity


@dataclass(frozen=True)
class ClearScores:
    mota: float
    motp: float
    moda: float
    tp: int
    fn: int
    fp: int
    idsw: int
    idtr: int


@dataclass(frozen=True)
class IdentityScores:
    idf1: float
    id_recall: float
    id_precision: float
    idtp: int
    idfn: int
    idfp: int


@dataclass(frozen=True)
class PrCurve:
    alpha_tr: float
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    interp_precision: tuple[float, ...]
    ap: float


@dataclass(frozen=True)
class TrackMapScores:
    map: float
    curves: tuple[PrCurve, ...] = field(default_factory=tuple)


def clear_mot(
    seq: SequencePair, sim: list[np.ndarray], alpha: float = 0.5
) -> ClearScores:
    """Sequential CLEAR matching with previous-frame carry-over.

    Pairs from the previous frame are kept when both members are present
    with S >= alpha; the Hungarian algorithm fills the remainder to
    maximize TP count, then summed similarity.  IDSW is counted against
    the most recent earlier TP of the same gtID (looking back across
    gaps); ID transfer (the prID transpose) is reported informationally
    and never enters MOTA.
    """
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    prev_pairs: dict[int, int] = {}
    tps: list[tuple[int, int, int, float]] = []  # (frame, gt_id, pr_id, S)

    for frame_idx, (gts, prs, mat) in enumerate(zip(gt_frames, pr_frames, sim)):
        frame_pairs: dict[int, int] = {}
        gt_ids = [d.id for d in gts]
        pr_ids = [d.id for d in prs]
        gt_pos = {g: i for i, g in enumerate(gt_ids)}
        pr_pos = {p: j for j, p in enumerate(pr_ids)}
        # Carry over previous-frame pairs that are still valid matches.
        for g, p in prev_pairs.items():
            if g in gt_pos and p in pr_pos and mat[gt_pos[g], pr_pos[p]] >= alpha:
                frame_pairs[g] = p
        free_gt = [g for g in gt_ids if g not in frame_pairs]
        used_pr = set(frame_pairs.values())
        free_pr = [p for p in pr_ids if p not in used_pr]
        if free_gt and free_pr:
            tier = min(len(free_gt), len(free_pr)) + 1
            score = np.full((len(free_gt), len(free_pr)), np.nan)
            for i, g in enumerate(free_gt):
                for j, p in enumerate(free_pr):
                    s = mat[gt_pos[g], pr_pos[p]]
                    if s >= alpha:
                        score[i, j] = tier + s
            for i, j in solve_max(score).pairs:
                frame_pairs[free_gt[i]] = free_pr[j]
        for g, p in sorted(frame_pairs.items()):
            tps.append((frame_idx + 1, g, p, float(mat[gt_pos[g], pr_pos[p]])))
        prev_pairs = frame_pairs

    idsw = _first_order_switches(tps, key_idx=1, other_idx=2)
    idtr = _first_order_switches(tps, key_idx=2, other_idx=1)
    tp = len(tps)
    fn = len(seq.gt) - tp
    fp = len(seq.pr) - tp
    num_gt = len(seq.gt)
    if num_gt:
        mota = 1.0 - (fn + fp + idsw) / num_gt
        moda = 1.0 - (fn + fp) / num_gt
    else:
        # No gt: vacuously perfect without predictions, else each FP counts
        # against a unit denominator (the usual ratio is undefined here).
        mota = 1.0 - float(fn + fp + idsw)
        moda = 1.0 - float(fn + fp)
    motp = sum(s for *_, s in tps) / tp if tp else 1.0
    return ClearScores(mota, motp, moda, tp, fn, fp, idsw, idtr)


def _first_order_switches(
    tps: list[tuple[int, int, int, float]], key_idx: int, other_idx: int
) -> int:
    """TPs whose partner id differs from the most recent earlier TP sharing
    the same key id."""
    last: dict[int, int] = {}
    count = 0
    for rec in sorted(tps, key=lambda r: r[0]):
        key = rec[key_idx]
        other = rec[other_idx]
        if key in last and last[key] != other:
            count += 1
        last[key] = other
    return count


def moda_decomposition(detre: float, detpr: float) -> float:
    """MODA rearranged as DetRe * (2 - 1/DetPr)."""
    if detpr == 0:
        raise ZeroDivisionError("MODA decomposition undefined for DetPr = 0")
    return detre * (2.0 - 1.0 / detpr)


def idf1(
    seq: SequencePair, sim: list[np.ndarray], alpha: float = 0.5
) -> IdentityScores:
    """Trajectory-level bijective matching minimizing IDFN + IDFP.

    Unmatched trajectories contribute all their detections as IDFN/IDFP
    via an augmented square cost matrix.  Localisation is not optimized
    beyond the S >= alpha gate.
    """
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    overlap: dict[tuple[int, int], int] = defaultdict(int)
    for gts, prs, mat in zip(gt_frames, pr_frames, sim):
        for i, g in enumerate(gts):
            for j, p in enumerate(prs):
                if mat[i, j] >= alpha:
                    overlap[(g.id, p.id)] += 1
    gt_len: dict[int, int] = defaultdict(int)
    pr_len: dict[int, int] = defaultdict(int)
    for d in seq.gt:
        gt_len[d.id] += 1
    for d in seq.pr:
        pr_len[d.id] += 1
    gt_ids = sorted(gt_len)
    pr_ids = sorted(pr_len)
    ng, np_ = len(gt_ids), len(pr_ids)
    total_gt = len(seq.gt)
    total_pr = len(seq.pr)

    idtp = 0
    if ng and np_:
        n = ng + np_
        cost = np.full((n, n), np.inf)
        for i, g in enumerate(gt_ids):
            for j, p in enumerate(pr_ids):
                m = overlap.get((g, p), 0)
                cost[i, j] = gt_len[g] + pr_len[p] - 2 * m
            cost[i, np_ + i] = gt_len[g]
        for j, p in enumerate(pr_ids):
            cost[ng + j, j] = pr_len[p]
        cost[ng:, np_:] = 0.0
        rows, cols = linear_sum_assignment(cost)
        for i, j in zip(rows, cols):
            if i < ng and j < np_:
                idtp += overlap.get((gt_ids[i], pr_ids[j]), 0)
    idfn = total_gt - idtp
    idfp = total_pr - idtp
    if total_gt == 0 and total_pr == 0:
        return IdentityScores(1.0, 1.0, 1.0, 0, 0, 0)
    f1 = idtp / (idtp + 0.5 * idfn + 0.5 * idfp) if idtp + idfn + idfp else 1.0
    recall = idtp / (idtp + idfn) if idtp + idfn else 0.0
    precision = idtp / (idtp + idfp) if idtp + idfp else 0.0
    return IdentityScores(f1, recall, precision, idtp, idfn, idfp)


def s_tr_detection(
    gt_traj: list[Detection], pr_traj: list[Detection], alpha: float = 0.5
) -> float:
    """Trajectory similarity as a Jaccard over per-frame detection matches."""
    gt_by_frame = {d.frame: d for d in gt_traj}
    pr_by_frame = {d.frame: d for d in pr_traj}
    tp = 0
    for frame, g in gt_by_frame.items():
        p = pr_by_frame.get(frame)
        if p is not None and similarity(g.geometry, p.geometry) >= alpha:
            tp += 1
    fn = len(gt_by_frame) - tp
    fp = len(pr_by_frame) - tp
    den = tp + fn + fp
    return tp / den if den else 1.0


def s_tr_spatiotemporal(
    gt_traj: list[Detection], pr_traj: list[Detection]
) -> float:
    """Summed spatial intersection over summed spatial union across frames.

    A frame where only one trajectory is present contributes that box's
    area to the union and nothing to the intersection.
    """
    gt_by_frame = {d.frame: d for d in gt_traj}
    pr_by_frame = {d.frame: d for d in pr_traj}
    inter_sum = 0.0
    union_sum = 0.0
    for frame in set(gt_by_frame) | set(pr_by_frame):
        g = gt_by_frame.get(frame)
        p = pr_by_frame.get(frame)
        if g is not None and not isinstance(g.geometry, Box2D):
            raise FormatError("spatiotemporal trajectory similarity needs boxes")
        if p is not None and not isinstance(p.geometry, Box2D):
            raise FormatError("spatiotemporal trajectory similarity needs boxes")
        if g is not None and p is not None:
            a: Box2D = g.geometry
            b: Box2D = p.geometry
            ix = min(a.left + a.width, b.left + b.width) - max(a.left, b.left)
            iy = min(a.top + a.height, b.top + b.height) - max(a.top, b.top)
            inter = ix * iy if ix > 0 and iy > 0 else 0.0
            inter_sum += inter
            union_sum += a.area + b.area - inter
        elif g is not None:
            union_sum += g.geometry.area
        elif p is not None:
            union_sum += p.geometry.area
    return inter_sum / union_sum if union_sum else 1.0


_RECALL_POINTS = [i / 100 for i in range(101)]


def track_map(
    seq: SequencePair,
    alpha_tr: float | list[float] = 0.5,
    variant: str = "detection",
    alpha: float = 0.5,
) -> TrackMapScores:
    """Track-mAP over confidence-ranked predicted trajectories.

    Trajectory confidence is the mean of its detection confidences.
    Greedy matching by decreasing confidence (input-order tie-break); a
    prTraj eligible for several gtTrajs takes the one with highest
    trajectory similarity.  AP is the average of the interpolated
    precision at 101 fixed recall points.
    """
    if variant not in ("detection", "spatiotemporal"):
        raise ValueError(f"unknown trajectory-similarity variant {variant!r}")
    gt_trajs: dict[int, list[Detection]] = defaultdict(list)
    pr_trajs: dict[int, list[Detection]] = defaultdict(list)
    for d in seq.gt:
        gt_trajs[d.id].append(d)
    for d in seq.pr:
        pr_trajs[d.id].append(d)
    for d in seq.pr:
        if not (0.0 <= d.confidence <= 1.0):
            raise FormatError(
                f"prediction confidence out of range for id {d.id}: {d.confidence}"
            )
    pr_order = list(pr_trajs)  # input order is insertion order of first det
    conf = {
        p: sum(d.confidence for d in dets) / len(dets)
        for p, dets in pr_trajs.items()
    }
    ranked = sorted(pr_order, key=lambda p: (-conf[p], pr_order.index(p)))

    thresholds = [alpha_tr] if isinstance(alpha_tr, (int, float)) else list(alpha_tr)
    curves: list[PrCurve] = []
    for a_tr in thresholds:
        matched_gt: set[int] = set()
        flags: list[bool] = []
        for p in ranked:
            best_gt = None
            best_sim = -1.0
            for g in sorted(gt_trajs):
                if g in matched_gt:
                    continue
                if variant == "detection":
                    s = s_tr_detection(gt_trajs[g], pr_trajs[p], alpha)
                else:
                    s = s_tr_spatiotemporal(gt_trajs[g], pr_trajs[p])
                if s >= a_tr and s > best_sim:
                    best_gt = g
                    best_sim = s
            if best_gt is not None:
                matched_gt.add(best_gt)
                flags.append(True)
            else:
                flags.append(False)
        num_gt_trajs = len(gt_trajs)
        precision: list[float] = []
        recall: list[float] = []
        tptr = 0
        for n, flag in enumerate(flags, start=1):
            tptr += int(flag)
            precision.append(tptr / n)
            recall.append(tptr / num_gt_trajs if num_gt_trajs else 1.0)
        interp = list(precision)
        for n in range(len(interp) - 2, -1, -1):
            interp[n] = max(interp[n], interp[n + 1])
        ap = _average_precision(recall, interp)
        curves.append(PrCurve(a_tr, tuple(precision), tuple(recall), tuple(interp), ap))
    return TrackMapScores(
        map=sum(c.ap for c in curves) / len(curves),
        curves=tuple(curves),
    )


def _average_precision(recall: list[float], interp: list[float]) -> float:
    total = 0.0
    for r in _RECALL_POINTS:
        best = 0.0
        for re, pr in zip(recall, interp):
            if re >= r - 1e-12:
                best = max(best, pr)
        total += best
    return total / len(_RECALL_POINTS)
