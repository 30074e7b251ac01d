"""HOTA extensions: online, fragmentation-aware, weighted,
classification-aware (plain, class-averaged, federated) and
confidence-ranked variants."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hota import (
    CANONICAL_ALPHAS,
    AlphaScores,
    HotaScores,
    association_counts,
    evaluate_sequence,
    integrate,
    match_alpha,
    pool,
)
from .model import FormatError, SequencePair, build_similarity


@dataclass(frozen=True)
class Weights:
    """Error-type weights, each in [0, 1]; all ones reproduces plain HOTA."""

    w_fn: float = 1.0
    w_fp: float = 1.0
    w_fna: float = 1.0
    w_fpa: float = 1.0

    def __post_init__(self) -> None:
        for name, v in (("w_fn", self.w_fn), ("w_fp", self.w_fp),
                        ("w_fna", self.w_fna), ("w_fpa", self.w_fpa)):
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class ClassProbs:
    """Per-prediction class probability vectors, keyed by (frame, prID)."""

    probs: dict[tuple[int, int], dict[int, float]]

    def __post_init__(self) -> None:
        for key, vec in self.probs.items():
            total = sum(vec.values())
            if abs(total - 1.0) > 1e-9:
                raise FormatError(
                    f"class probabilities for {key} sum to {total}, expected 1"
                )

    def prob(self, frame: int, pr_id: int, class_id: int) -> float:
        try:
            vec = self.probs[(frame, pr_id)]
        except KeyError:
            raise KeyError(
                f"no class probabilities for prediction id {pr_id} in frame {frame}"
            ) from None
        return vec.get(class_id, 0.0)


@dataclass(frozen=True)
class FederationMask:
    """Per frame, the class ids for which false positives are evaluable."""

    evaluable: dict[int, frozenset[int]]

    def allows(self, frame: int, class_id: int) -> bool:
        return class_id in self.evaluable.get(frame, frozenset())

    @staticmethod
    def full(frames: Sequence[int], classes: Sequence[int]) -> "FederationMask":
        cls = frozenset(classes)
        return FederationMask({f: cls for f in frames})


@dataclass(frozen=True)
class ScalarByAlpha:
    per_alpha: tuple[tuple[float, float], ...]
    integrated: float


@dataclass(frozen=True)
class ClassScores:
    per_class: dict[int, float]
    per_alpha_mean: tuple[tuple[float, float], ...]
    mean: float


def _gt_class_lookup(seq: SequencePair) -> dict[tuple[int, int], int]:
    return {(d.frame, d.id): d.class_id for d in seq.gt}


def ohota(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> HotaScores:
    """Online HOTA: matching as in HOTA, but each TP's association score
    only uses time-steps up to the TP's own frame."""
    if sim is None:
        sim = build_similarity(seq)
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    records = []
    for alpha in alphas:
        matches = match_alpha(seq, sim, alpha)
        by_frame: dict[int, list] = defaultdict(list)
        for m in matches.matches:
            by_frame[m.frame].append(m)
        gt_cum: Counter[int] = Counter()
        pr_cum: Counter[int] = Counter()
        tpa_cum: Counter[tuple[int, int]] = Counter()
        sum_a = sum_assre = sum_asspr = 0.0
        for frame_idx, (gts, prs) in enumerate(zip(gt_frames, pr_frames)):
            frame = frame_idx + 1
            for d in gts:
                gt_cum[d.id] += 1
            for d in prs:
                pr_cum[d.id] += 1
            for m in by_frame.get(frame, ()):
                tpa_cum[(m.gt_id, m.pr_id)] += 1
            for m in by_frame.get(frame, ()):
                tpa = tpa_cum[(m.gt_id, m.pr_id)]
                g_tot = gt_cum[m.gt_id]
                p_tot = pr_cum[m.pr_id]
                sum_a += tpa / (g_tot + p_tot - tpa)
                sum_assre += tpa / g_tot
                sum_asspr += tpa / p_tot
        den = matches.tp + matches.fn + matches.fp
        if len(seq.gt) == 0 and len(seq.pr) == 0:
            records.append(AlphaScores(alpha, 1, 1, 1, 1, 1, 1, 1, 1))
            continue
        tp = matches.tp
        deta = tp / den if den else 0.0
        records.append(AlphaScores(
            alpha=alpha,
            hota=math.sqrt(sum_a / den) if den else 0.0,
            deta=deta,
            assa=sum_a / tp if tp else 0.0,
            detre=tp / (tp + matches.fn) if tp + matches.fn else 0.0,
            detpr=tp / (tp + matches.fp) if tp + matches.fp else 0.0,
            assre=sum_assre / tp if tp else 0.0,
            asspr=sum_asspr / tp if tp else 0.0,
            loca=matches.sum_s / tp if tp else 1.0,
        ))
    return integrate(records, allow_custom_grid=tuple(alphas) != CANONICAL_ALPHAS)


def fa_hota(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> tuple[HotaScores, ScalarByAlpha]:
    """Fragmentation-aware HOTA plus the overall fragmentation accuracy.

    A fragment is a maximal run of TPAs of one (gtID, prID) pair over
    consecutive frames; any frame gap or intervening FNA/FPA breaks it.
    """
    if sim is None:
        sim = build_similarity(seq)
    records = []
    fraga_points: list[tuple[float, float]] = []
    for alpha in alphas:
        matches = match_alpha(seq, sim, alpha)
        counts = association_counts(matches, seq)
        pair_frames: dict[tuple[int, int], list[int]] = defaultdict(list)
        for m in matches.matches:
            pair_frames[(m.gt_id, m.pr_id)].append(m.frame)
        # Fragment length for each matched frame of each pair.
        frag_len: dict[tuple[int, int, int], int] = {}
        for pair, frames in pair_frames.items():
            frames.sort()
            run: list[int] = []
            for f in frames + [None]:  # type: ignore[list-item]
                if run and (f is None or f != run[-1] + 1):
                    for rf in run:
                        frag_len[(pair[0], pair[1], rf)] = len(run)
                    run = []
                if f is not None:
                    run.append(f)
        sum_af = 0.0
        sum_f = 0.0
        for m in matches.matches:
            tpa = counts.tpa[(m.gt_id, m.pr_id)]
            den_c = counts.gt_total[m.gt_id] + counts.pr_total[m.pr_id] - tpa
            a = tpa / den_c
            f_c = frag_len[(m.gt_id, m.pr_id, m.frame)] / den_c
            sum_af += math.sqrt(a * f_c)
            sum_f += f_c
        den = matches.tp + matches.fn + matches.fp
        if len(seq.gt) == 0 and len(seq.pr) == 0:
            records.append(AlphaScores(alpha, 1, 1, 1, 1, 1, 1, 1, 1))
            fraga_points.append((alpha, 1.0))
            continue
        tp = matches.tp
        deta = tp / den if den else 0.0
        records.append(AlphaScores(
            alpha=alpha,
            hota=math.sqrt(sum_af / den) if den else 0.0,
            deta=deta,
            assa=sum_af / tp if tp else 0.0,
            detre=tp / (tp + matches.fn) if tp + matches.fn else 0.0,
            detpr=tp / (tp + matches.fp) if tp + matches.fp else 0.0,
            assre=0.0,
            asspr=0.0,
            loca=matches.sum_s / tp if tp else 1.0,
        ))
        fraga_points.append((alpha, sum_f / tp if tp else 0.0))
    scores = integrate(records, allow_custom_grid=tuple(alphas) != CANONICAL_ALPHAS)
    fraga = ScalarByAlpha(
        per_alpha=tuple(fraga_points),
        integrated=sum(v for _, v in fraga_points) / len(fraga_points),
    )
    return scores, fraga


def w_hota(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    w: Weights = Weights(),
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> HotaScores:
    """Importance-weighted HOTA; the all-ones weighting reproduces HOTA
    bit for bit."""
    if sim is None:
        sim = build_similarity(seq)
    records = []
    for alpha in alphas:
        matches = match_alpha(seq, sim, alpha)
        counts = association_counts(matches, seq)
        sum_a = sum_assre = sum_asspr = 0.0
        for (g, p), tpa in counts.tpa.items():
            fna = counts.gt_total[g] - tpa
            fpa = counts.pr_total[p] - tpa
            sum_a += tpa * (tpa / (tpa + w.w_fna * fna + w.w_fpa * fpa))
            sum_assre += tpa * (tpa / (tpa + w.w_fna * fna))
            sum_asspr += tpa * (tpa / (tpa + w.w_fpa * fpa))
        if len(seq.gt) == 0 and len(seq.pr) == 0:
            records.append(AlphaScores(alpha, 1, 1, 1, 1, 1, 1, 1, 1))
            continue
        tp = matches.tp
        den = tp + w.w_fn * matches.fn + w.w_fp * matches.fp
        records.append(AlphaScores(
            alpha=alpha,
            hota=math.sqrt(sum_a / den) if den else 0.0,
            deta=tp / den if den else 0.0,
            assa=sum_a / tp if tp else 0.0,
            detre=tp / (tp + w.w_fn * matches.fn) if tp + w.w_fn * matches.fn else 0.0,
            detpr=tp / (tp + w.w_fp * matches.fp) if tp + w.w_fp * matches.fp else 0.0,
            assre=sum_assre / tp if tp else 0.0,
            asspr=sum_asspr / tp if tp else 0.0,
            loca=matches.sum_s / tp if tp else 1.0,
        ))
    return integrate(records, allow_custom_grid=tuple(alphas) != CANONICAL_ALPHAS)


def ca_hota(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    probs: ClassProbs | None = None,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> tuple[HotaScores, ScalarByAlpha]:
    """Classification-aware HOTA and the overall classification accuracy.

    The matching score's association term is weighted by the probability
    the prediction assigns to the ground-truth class, and each TP's
    contribution is weighted the same way.
    """
    if sim is None:
        sim = build_similarity(seq)
    if probs is None:
        raise ValueError("ca_hota requires class probabilities")
    gt_class = _gt_class_lookup(seq)

    def weight(frame: int, gt_id: int, pr_id: int) -> float:
        return probs.prob(frame, pr_id, gt_class[(frame, gt_id)])

    records = []
    claa_points: list[tuple[float, float]] = []
    for alpha in alphas:
        matches = match_alpha(seq, sim, alpha, pair_weight=weight)
        counts = association_counts(matches, seq)
        c_sum_by_pair: dict[tuple[int, int], float] = defaultdict(float)
        sum_c = 0.0
        for m in matches.matches:
            c = weight(m.frame, m.gt_id, m.pr_id)
            c_sum_by_pair[(m.gt_id, m.pr_id)] += c
            sum_c += c
        sum_ac = 0.0
        for (g, p), tpa in counts.tpa.items():
            a = tpa / (counts.gt_total[g] + counts.pr_total[p] - tpa)
            sum_ac += c_sum_by_pair[(g, p)] * a
        if len(seq.gt) == 0 and len(seq.pr) == 0:
            records.append(AlphaScores(alpha, 1, 1, 1, 1, 1, 1, 1, 1))
            claa_points.append((alpha, 1.0))
            continue
        tp = matches.tp
        den = tp + matches.fn + matches.fp
        deta = tp / den if den else 0.0
        records.append(AlphaScores(
            alpha=alpha,
            hota=math.sqrt(sum_ac / den) if den else 0.0,
            deta=deta,
            assa=sum_ac / tp if tp else 0.0,
            detre=tp / (tp + matches.fn) if tp + matches.fn else 0.0,
            detpr=tp / (tp + matches.fp) if tp + matches.fp else 0.0,
            assre=0.0,
            asspr=0.0,
            loca=matches.sum_s / tp if tp else 1.0,
        ))
        claa_points.append((alpha, sum_c / tp if tp else 0.0))
    scores = integrate(records, allow_custom_grid=tuple(alphas) != CANONICAL_ALPHAS)
    claa = ScalarByAlpha(
        per_alpha=tuple(claa_points),
        integrated=sum(v for _, v in claa_points) / len(claa_points),
    )
    return scores, claa


def _class_scores(
    seq: SequencePair,
    sim: list[np.ndarray],
    probs: ClassProbs,
    alphas: Sequence[float],
    mask: FederationMask | None,
) -> ClassScores:
    gt_class = _gt_class_lookup(seq)

    def weight(frame: int, gt_id: int, pr_id: int) -> float:
        return probs.prob(frame, pr_id, gt_class[(frame, gt_id)])

    all_classes = sorted(
        {d.class_id for d in seq.gt}
        | {cls for vec in probs.probs.values() for cls in vec}
    )
    per_class_sums: dict[int, float] = defaultdict(float)
    per_class_alphas: dict[int, int] = defaultdict(int)
    alpha_means: list[tuple[float, float]] = []
    for alpha in alphas:
        matches = match_alpha(seq, sim, alpha, pair_weight=weight)
        counts = association_counts(matches, seq)
        matched_gt = {(m.frame, m.gt_id) for m in matches.matches}
        matched_pr = {(m.frame, m.pr_id) for m in matches.matches}
        fps = [d for d in seq.pr if (d.frame, d.id) not in matched_pr]
        class_vals: list[float] = []
        for cls in all_classes:
            tp_cls = 0
            num = 0.0
            for m in matches.matches:
                if gt_class[(m.frame, m.gt_id)] != cls:
                    continue
                tp_cls += 1
                tpa = counts.tpa[(m.gt_id, m.pr_id)]
                a = tpa / (counts.gt_total[m.gt_id] + counts.pr_total[m.pr_id] - tpa)
                num += a * probs.prob(m.frame, m.pr_id, cls)
            fn_cls = sum(
                1 for d in seq.gt
                if d.class_id == cls and (d.frame, d.id) not in matched_gt
            )
            fp_term = 0.0
            for f in fps:
                c = probs.prob(f.frame, f.id, cls)
                if mask is not None:
                    c *= 1.0 if mask.allows(f.frame, cls) else 0.0
                fp_term += c
            den = tp_cls + fn_cls + fp_term
            if den == 0:
                continue  # class absent from gt and from evaluable FP mass
            val = math.sqrt(num / den)
            class_vals.append(val)
            per_class_sums[cls] += val
            per_class_alphas[cls] += 1
        alpha_means.append(
            (alpha, sum(class_vals) / len(class_vals) if class_vals else 1.0)
        )
    per_class = {
        cls: per_class_sums[cls] / per_class_alphas[cls] for cls in per_class_sums
    }
    return ClassScores(
        per_class=per_class,
        per_alpha_mean=tuple(alpha_means),
        mean=sum(v for _, v in alpha_means) / len(alpha_means),
    )


def ca2_hota(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    probs: ClassProbs | None = None,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> ClassScores:
    """Class-averaged classification-aware HOTA: per-class scores averaged
    over classes before averaging over thresholds."""
    if sim is None:
        sim = build_similarity(seq)
    if probs is None:
        raise ValueError("ca2_hota requires class probabilities")
    return _class_scores(seq, sim, probs, alphas, mask=None)


def fed_hota(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    probs: ClassProbs | None = None,
    mask: FederationMask | None = None,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> ClassScores:
    """Federated evaluation: the false-positive term only counts frames
    where the class is marked evaluable."""
    if sim is None:
        sim = build_similarity(seq)
    if probs is None:
        raise ValueError("fed_hota requires class probabilities")
    if mask is None:
        mask = FederationMask({})
    return _class_scores(seq, sim, probs, alphas, mask=mask)


def cr_hota(
    seqs: Sequence[SequencePair],
    alphas: Sequence[float] = CANONICAL_ALPHAS,
    recall_targets: Sequence[float] = CANONICAL_ALPHAS,
) -> float:
    """Confidence-ranked HOTA over a benchmark.

    For each recall target, the smallest confidence prefix reaching that
    detection recall is evaluated and contributes HOTA/DetRe; unreachable
    targets contribute zero.
    """
    for seq in seqs:
        for d in seq.pr:
            if not (0.0 <= d.confidence <= 1.0):
                raise FormatError(
                    f"missing or invalid confidence for prediction id {d.id} "
                    f"in {seq.name!r}"
                )
    thresholds = sorted({d.confidence for seq in seqs for d in seq.pr}, reverse=True)
    prefix_scores: list[tuple[float, float]] = []  # (detre, hota) per prefix
    for theta in thresholds:
        counters = []
        for seq in seqs:
            filtered = SequencePair(
                name=seq.name,
                num_frames=seq.num_frames,
                gt=seq.gt,
                pr=tuple(d for d in seq.pr if d.confidence >= theta),
            )
            _, c = evaluate_sequence(filtered, alphas=alphas)
            counters.append(c)
        pooled = pool(counters)
        prefix_scores.append((pooled.detre, pooled.hota))
    total = 0.0
    for k in recall_targets:
        for detre, hota_val in prefix_scores:
            if detre >= k - 1e-12:
                total += hota_val / detre
                break
    return total / len(recall_targets)
