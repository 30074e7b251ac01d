"""Brute-force cross-checks: exhaustive matching enumeration, alternative
inner/outer score formulations, and a randomized equivalence harness."""

from __future__ import annotations

import math
import random
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .hota import association_counts, match_alpha
from .model import Box2D, Detection, SequencePair, build_similarity

MAX_DETS_PER_SIDE = 6
MAX_FRAMES = 6

FORMULATIONS = ("jaccard", "f1", "moda", "excl_det_assoc")


class SizeError(ValueError):
    """Instance too large for factorial enumeration."""


def _frame_matchings(
    gts: list[Detection], prs: list[Detection], eligible: np.ndarray
) -> list[tuple[tuple[int, int], ...]]:
    """All bijective pairings (including partial and empty ones) over the
    eligible cells of one frame, as (gt_id, pr_id) tuples."""
    out: list[tuple[tuple[int, int], ...]] = []
    cols = list(range(len(prs)))

    def rec(i: int, used: set[int], acc: list[tuple[int, int]]) -> None:
        if i == len(gts):
            out.append(tuple(acc))
            return
        rec(i + 1, used, acc)  # leave gt row i unmatched
        for j in cols:
            if j in used or not eligible[i, j]:
                continue
            used.add(j)
            acc.append((gts[i].id, prs[j].id))
            rec(i + 1, used, acc)
            acc.pop()
            used.remove(j)

    rec(0, set(), [])
    return out


def count_combinations(seq: SequencePair, sim: list[np.ndarray], alpha: float) -> int:
    """Product over frames of the number of per-frame matchings enumerated
    by exhaustive_hota."""
    total = 1
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    for gts, prs, mat in zip(gt_frames, pr_frames, sim):
        total *= len(_frame_matchings(gts, prs, mat >= alpha))
    return total


def exhaustive_hota(
    seq: SequencePair, sim: list[np.ndarray] | None = None, alpha: float = 0.5
) -> float:
    """Best HOTA at one threshold over every combination of per-frame
    bijective pairings with S >= alpha."""
    if sim is None:
        sim = build_similarity(seq)
    if seq.num_frames > MAX_FRAMES:
        raise SizeError(f"{seq.num_frames} frames exceeds the {MAX_FRAMES}-frame bound")
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    for gts, prs in zip(gt_frames, pr_frames):
        if len(gts) > MAX_DETS_PER_SIDE or len(prs) > MAX_DETS_PER_SIDE:
            raise SizeError(
                f"more than {MAX_DETS_PER_SIDE} detections on one side of a frame"
            )
    per_frame = [
        _frame_matchings(gts, prs, mat >= alpha)
        for gts, prs, mat in zip(gt_frames, pr_frames, sim)
    ]
    num_gt = len(seq.gt)
    num_pr = len(seq.pr)
    if num_gt == 0 and num_pr == 0:
        return 1.0
    gt_total = Counter(d.id for d in seq.gt)
    pr_total = Counter(d.id for d in seq.pr)

    tpa: Counter[tuple[int, int]] = Counter()
    best = 0.0

    def rec(f: int, tp: int) -> None:
        nonlocal best
        if f == len(per_frame):
            den = num_gt + num_pr - tp
            if den == 0:
                return
            total = sum(
                n * n / (gt_total[g] + pr_total[p] - n)
                for (g, p), n in tpa.items()
            )
            best = max(best, total / den)
            return
        for matching in per_frame[f]:
            for pair in matching:
                tpa[pair] += 1
            rec(f + 1, tp + len(matching))
            for pair in matching:
                tpa[pair] -= 1
                if tpa[pair] == 0:
                    del tpa[pair]

    rec(0, 0)
    return math.sqrt(best)


def alt_formulation_scores(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    alpha: float = 0.5,
    formulation: str = "jaccard",
) -> float:
    """Double score with an alternative inner/outer formulation, on the
    standard matching.

    jaccard is the reference formulation; f1 halves the FN/FP weights at
    both levels; moda subtracts FPs from the numerator (asymmetric,
    clamped at 0); excl_det_assoc computes association only over TPs.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}")
    if sim is None:
        sim = build_similarity(seq)
    matches = match_alpha(seq, sim, alpha)
    counts = association_counts(matches, seq)
    tp, fn, fp = matches.tp, matches.fn, matches.fp
    if tp + fn + fp == 0:
        return 1.0

    gt_tp_total: Counter[int] = Counter()
    pr_tp_total: Counter[int] = Counter()
    for m in matches.matches:
        gt_tp_total[m.gt_id] += 1
        pr_tp_total[m.pr_id] += 1

    if formulation == "jaccard":
        total = sum(
            n * (n / (counts.gt_total[g] + counts.pr_total[p] - n))
            for (g, p), n in counts.tpa.items()
        )
        return math.sqrt(total / (tp + fn + fp))
    if formulation == "f1":
        total = 0.0
        for (g, p), n in counts.tpa.items():
            fna = counts.gt_total[g] - n
            fpa = counts.pr_total[p] - n
            total += n * (n / (n + 0.5 * fna + 0.5 * fpa))
        return math.sqrt(total / (tp + 0.5 * fn + 0.5 * fp))
    if formulation == "moda":
        total = 0.0
        for (g, p), n in counts.tpa.items():
            fna = counts.gt_total[g] - n
            fpa = counts.pr_total[p] - n
            total += n * ((n - fpa) / (n + fna))
        if tp + fn == 0:
            return 0.0
        return math.sqrt(max(0.0, (total - fp) / (tp + fn)))
    # excl_det_assoc: FNAs/FPAs restricted to detections that are TPs.
    total = sum(
        n * (n / (gt_tp_total[g] + pr_tp_total[p] - n))
        for (g, p), n in counts.tpa.items()
    )
    return math.sqrt(total / (tp + fn + fp))


def random_sequence(
    rng: random.Random,
    max_frames: int = 6,
    max_dets: int = 5,
    combination_cap: int = 50_000,
    alpha_floor: float = 0.25,
) -> SequencePair:
    """Small random box sequence suitable for exhaustive enumeration.

    Resamples until the matching combination count at the loosest
    threshold of interest stays under `combination_cap`.
    """
    for _ in range(200):
        num_frames = rng.randint(1, max_frames)
        gt: list[Detection] = []
        pr: list[Detection] = []
        n_objects = rng.randint(1, max_dets)
        n_tracks = rng.randint(1, max_dets)
        for frame in range(1, num_frames + 1):
            slots: list[float] = []
            for obj in range(1, n_objects + 1):
                if rng.random() < 0.7:
                    x = obj * 30.0 + rng.uniform(-2.0, 2.0)
                    slots.append(x)
                    gt.append(Detection(frame, obj, Box2D(x, 0.0, 10.0, 10.0)))
            for tr in range(1, n_tracks + 1):
                if rng.random() < 0.7:
                    if slots and rng.random() < 0.8:
                        x = rng.choice(slots) + rng.uniform(0.0, 6.0)
                    else:
                        x = rng.uniform(0.0, 150.0)
                    pr.append(Detection(frame, tr, Box2D(x, 0.0, 10.0, 10.0)))
        seq = SequencePair("random", num_frames, tuple(gt), tuple(pr))
        sim = build_similarity(seq)
        if count_combinations(seq, sim, alpha_floor) <= combination_cap:
            return seq
    raise RuntimeError("failed to sample a small enough random instance")


@dataclass(frozen=True)
class OracleReport:
    trials: int
    alphas: tuple[float, ...]
    max_abs_diff: float
    elapsed_seconds: float

    @property
    def ok(self) -> bool:
        return self.max_abs_diff <= 1e-9


def oracle_check(
    trials: int = 200,
    seed: int = 0,
    alphas: tuple[float, ...] = (0.25, 0.5, 0.75),
) -> OracleReport:
    """Compare the engine's per-threshold HOTA with exhaustive enumeration
    on seeded random instances."""
    rng = random.Random(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(trials):
        seq = random_sequence(rng, alpha_floor=min(alphas))
        sim = build_similarity(seq)
        for alpha in alphas:
            matches = match_alpha(seq, sim, alpha)
            counts = association_counts(matches, seq)
            den = matches.tp + matches.fn + matches.fp
            if den == 0:
                core = 1.0
            else:
                total = sum(
                    n * (n / (counts.gt_total[g] + counts.pr_total[p] - n))
                    for (g, p), n in counts.tpa.items()
                )
                core = math.sqrt(total / den)
            ref = exhaustive_hota(seq, sim, alpha)
            worst = max(worst, abs(core - ref))
    return OracleReport(
        trials=trials,
        alphas=tuple(alphas),
        max_abs_diff=worst,
        elapsed_seconds=time.perf_counter() - start,
    )
