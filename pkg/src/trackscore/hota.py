"""HOTA matching, association bookkeeping, per-threshold scores and
threshold integration.

Matching per frame maximizes, in order: the number of matched pairs, the
summed upper-bound association score, the summed localisation similarity.
The tiers are realized as a single composite score whose weights are
chosen per frame so a lower tier cannot outweigh a higher one.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .assignment import solve_max
from .model import SequencePair

# Canonical localisation thresholds: 0.05 to 0.95 in 0.05 steps.
CANONICAL_ALPHAS: tuple[float, ...] = tuple(i / 20 for i in range(1, 20))

PairWeight = Callable[[int, int, int], float]
"""Optional per-cell weight (frame, gt_id, pr_id) -> [0, 1] applied to the
association term of the matching score (classification-aware matching)."""


@dataclass(frozen=True)
class Match:
    gt_id: int
    pr_id: int
    frame: int
    similarity: float


@dataclass(frozen=True)
class MatchSet:
    alpha: float
    matches: tuple[Match, ...]
    tp: int
    fn: int
    fp: int
    sum_s: float


@dataclass(frozen=True)
class AssociationCounts:
    """Per (gtID, prID) TP tallies plus per-ID detection totals.

    gt_total / pr_total count all detections of an id, matched or not, so
    unmatched FNs and FPs of the same identity enter the association
    denominators.
    """

    tpa: dict[tuple[int, int], int]
    gt_total: dict[int, int]
    pr_total: dict[int, int]


@dataclass(frozen=True)
class AlphaScores:
    alpha: float
    hota: float
    deta: float
    assa: float
    detre: float
    detpr: float
    assre: float
    asspr: float
    loca: float


@dataclass(frozen=True)
class HotaScores:
    per_alpha: tuple[AlphaScores, ...]
    hota: float
    deta: float
    assa: float
    detre: float
    detpr: float
    assre: float
    asspr: float
    loca: float

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(s.alpha for s in self.per_alpha)


@dataclass(frozen=True)
class AlphaTally:
    """Mergeable raw tallies behind one per-alpha score record."""

    alpha: float
    tp: int
    fn: int
    fp: int
    sum_s: float
    sum_a: float
    sum_assre: float
    sum_asspr: float
    num_gt: int
    num_pr: int

    def merge(self, other: "AlphaTally") -> "AlphaTally":
        if other.alpha != self.alpha:
            raise ValueError(f"alpha mismatch: {self.alpha} vs {other.alpha}")
        return AlphaTally(
            alpha=self.alpha,
            tp=self.tp + other.tp,
            fn=self.fn + other.fn,
            fp=self.fp + other.fp,
            sum_s=self.sum_s + other.sum_s,
            sum_a=self.sum_a + other.sum_a,
            sum_assre=self.sum_assre + other.sum_assre,
            sum_asspr=self.sum_asspr + other.sum_asspr,
            num_gt=self.num_gt + other.num_gt,
            num_pr=self.num_pr + other.num_pr,
        )


@dataclass(frozen=True)
class PooledCounters:
    """Per-alpha tallies for benchmark-level count pooling.

    Merging is associative and commutative; merging with the empty counter
    is the identity.
    """

    tallies: tuple[AlphaTally, ...]

    @staticmethod
    def empty(alphas: Sequence[float] = CANONICAL_ALPHAS) -> "PooledCounters":
        return PooledCounters(tuple(
            AlphaTally(a, 0, 0, 0, 0.0, 0.0, 0.0, 0.0, 0, 0) for a in alphas
        ))

    def merge(self, other: "PooledCounters") -> "PooledCounters":
        if len(self.tallies) != len(other.tallies):
            raise ValueError("mismatched alpha grids in pooling")
        return PooledCounters(tuple(
            a.merge(b) for a, b in zip(self.tallies, other.tallies)
        ))


def potential_match_counts(
    seq: SequencePair, sim: list[np.ndarray], alpha: float
) -> dict[tuple[int, int], int]:
    """N(g, p): frames where detections of g and p overlap with S >= alpha."""
    counts: Counter[tuple[int, int]] = Counter()
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()
    for gts, prs, mat in zip(gt_frames, pr_frames, sim):
        for i, g in enumerate(gts):
            for j, p in enumerate(prs):
                if mat[i, j] >= alpha:
                    counts[(g.id, p.id)] += 1
    return dict(counts)


def id_totals(seq: SequencePair) -> tuple[dict[int, int], dict[int, int]]:
    gt_total = Counter(d.id for d in seq.gt)
    pr_total = Counter(d.id for d in seq.pr)
    return dict(gt_total), dict(pr_total)


def a_max(n: int, gt_total: int, pr_total: int) -> float:
    """Upper-bound association score from non-bijective co-occurrence counts."""
    if n == 0:
        return 0.0
    return n / (gt_total + pr_total - n)


def match_alpha(
    seq: SequencePair,
    sim: list[np.ndarray],
    alpha: float,
    pair_weight: PairWeight | None = None,
) -> MatchSet:
    """Per-frame bijective matching over cells with S >= alpha.

    Lexicographic objective per frame: match count, then summed A_max
    (optionally weighted per cell), then a cross-frame-consistent pair
    preference, then summed similarity.  The initial A_max assignment is
    then refined by coordinate ascent over frames on the true summed
    association score: A_max is only an upper-bound proxy and can
    strictly prefer a matching whose realized association is worse, for
    example by splitting one identity between a long and a short partner
    track when keeping the short one whole scores higher.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    potential = potential_match_counts(seq, sim, alpha)
    gt_total, pr_total = id_totals(seq)
    gt_frames = seq.gt_by_frame()
    pr_frames = seq.pr_by_frame()

    # Global pair preference: higher A_max first, then higher co-occurrence,
    # then id order.  Identical in every frame by construction, so exact
    # A_max ties resolve the same way everywhere.
    ranked = sorted(
        potential,
        key=lambda gp: (
            -a_max(potential[gp], gt_total[gp[0]], pr_total[gp[1]]),
            -potential[gp],
            gp,
        ),
    )
    bonus = {gp: (len(ranked) - r) / (len(ranked) + 1) for r, gp in enumerate(ranked)}

    def cell_weight(frame_idx: int, g: int, p: int) -> float:
        w = 1.0
        if pair_weight is not None:
            w = pair_weight(frame_idx + 1, g, p)
        return w

    # Initial assignment from the tiered A_max proxy.
    chosen: dict[int, list[tuple[int, int]]] = {}
    active: list[int] = []
    for frame_idx, (gts, prs, mat) in enumerate(zip(gt_frames, pr_frames, sim)):
        if not gts or not prs:
            continue
        eligible = mat >= alpha
        n = int(eligible.sum())
        if n == 0:
            continue
        active.append(frame_idx)
        tier = 2 * (n + 1)
        eps = 1.0 / tier
        score = np.full(mat.shape, np.nan)
        for i, g in enumerate(gts):
            for j, p in enumerate(prs):
                if not eligible[i, j]:
                    continue
                am = a_max(
                    potential.get((g.id, p.id), 0),
                    gt_total[g.id],
                    pr_total[p.id],
                ) * cell_weight(frame_idx, g.id, p.id)
                pref = bonus.get((g.id, p.id), 0.0)
                score[i, j] = tier + am + eps * (pref + eps * mat[i, j])
        chosen[frame_idx] = list(solve_max(score).pairs)

    def pair_gain(g: int, p: int, base: int) -> float:
        # Marginal true association gain of one more TP on (g, p) given
        # `base` TPs of that pair in the other frames.
        den = gt_total[g] + pr_total[p]
        before = base * base / (den - base) if base else 0.0
        after = (base + 1) * (base + 1) / (den - base - 1)
        return after - before

    def tally(state: dict[int, list[tuple[int, int]]]) -> Counter:
        counts: Counter[tuple[int, int]] = Counter()
        for frame_idx, pairs in state.items():
            gts = gt_frames[frame_idx]
            prs = pr_frames[frame_idx]
            for i, j in pairs:
                counts[(gts[i].id, prs[j].id)] += 1
        return counts

    def resolve_frame(
        frame_idx: int, counts: Counter, current: list[tuple[int, int]] | None
    ) -> list[tuple[int, int]]:
        gts = gt_frames[frame_idx]
        prs = pr_frames[frame_idx]
        mat = sim[frame_idx]
        eligible = mat >= alpha
        n = int(eligible.sum())
        tier = 2 * (n + 1)
        # True marginal gains only: any fixed tie-break term here could
        # outweigh small but real gain differences.  Ties fall through to
        # the deterministic pair selection of the solver and the
        # strict-improvement acceptance below.
        score = np.full(mat.shape, np.nan)
        for i, g in enumerate(gts):
            for j, p in enumerate(prs):
                if not eligible[i, j]:
                    continue
                gain = pair_gain(g.id, p.id, counts[(g.id, p.id)])
                gain *= cell_weight(frame_idx, g.id, p.id)
                score[i, j] = tier + gain
        new_pairs = list(solve_max(score).pairs)
        if current is not None and new_pairs != current:
            old_val = sum(score[i, j] for i, j in current)
            new_val = sum(score[i, j] for i, j in new_pairs)
            if new_val <= old_val + 1e-12:
                return current
        return new_pairs

    def ascend(state: dict[int, list[tuple[int, int]]], counts: Counter) -> None:
        # Re-solve one frame at a time against the realized association
        # counts of the others, until a full sweep changes nothing.
        for _ in range(100):
            changed = False
            for frame_idx in active:
                gts = gt_frames[frame_idx]
                prs = pr_frames[frame_idx]
                for i, j in state[frame_idx]:
                    counts[(gts[i].id, prs[j].id)] -= 1
                new_pairs = resolve_frame(frame_idx, counts, state[frame_idx])
                if new_pairs != state[frame_idx]:
                    state[frame_idx] = new_pairs
                    changed = True
                for i, j in state[frame_idx]:
                    counts[(gts[i].id, prs[j].id)] += 1
            if not changed:
                break

    def objective(state: dict[int, list[tuple[int, int]]]) -> tuple:
        counts = tally(state)
        tp = sum(counts.values())
        total_a = sum(
            cnt * cnt / (gt_total[g] + pr_total[p] - cnt)
            for (g, p), cnt in counts.items()
        )
        total_s = sum(
            float(sim[frame_idx][i, j])
            for frame_idx, pairs in state.items()
            for i, j in pairs
        )
        return (tp, total_a, total_s)

    counts = tally(chosen)
    ascend(chosen, counts)

    # Destroy-and-repair: frame-local ascent cannot make the coupled moves
    # needed when one identity's frames should be redistributed between
    # partner tracks, so evict one identity (or one pair's two identities,
    # re-seeding that pair everywhere it is eligible) and re-ascend.
    best_obj = objective(chosen)
    for _ in range(20):
        improved = False
        targets: list[tuple[str, object]] = (
            [("gt", g) for g in sorted(gt_total)]
            + [("pr", p) for p in sorted(pr_total)]
            + [("pair", gp) for gp in sorted(potential)]
        )
        for side, ident in targets:
            if side == "pair":
                g_id, p_id = ident  # type: ignore[misc]
                keep = lambda g, p: g != g_id and p != p_id
            elif side == "gt":
                keep = lambda g, p: g != ident
            else:
                keep = lambda g, p: p != ident
            trial = {
                frame_idx: [
                    (i, j) for i, j in pairs
                    if keep(gt_frames[frame_idx][i].id, pr_frames[frame_idx][j].id)
                ]
                for frame_idx, pairs in chosen.items()
            }
            if side == "pair":
                for frame_idx in active:
                    gts = gt_frames[frame_idx]
                    prs = pr_frames[frame_idx]
                    rows = [i for i, g in enumerate(gts) if g.id == g_id]
                    cols = [j for j, p in enumerate(prs) if p.id == p_id]
                    if not rows or not cols:
                        continue
                    i, j = rows[0], cols[0]
                    taken = trial[frame_idx]
                    if sim[frame_idx][i, j] >= alpha and not any(
                        i == ti or j == tj for ti, tj in taken
                    ):
                        taken.append((i, j))
            trial_counts = tally(trial)
            ascend(trial, trial_counts)
            trial_obj = objective(trial)
            if trial_obj[0] > best_obj[0] or (
                trial_obj[0] == best_obj[0] and trial_obj[1] > best_obj[1] + 1e-12
            ):
                chosen = trial
                best_obj = trial_obj
                improved = True
        if not improved:
            break

    matches: list[Match] = []
    sum_s = 0.0
    for frame_idx in active:
        gts = gt_frames[frame_idx]
        prs = pr_frames[frame_idx]
        mat = sim[frame_idx]
        for i, j in chosen[frame_idx]:
            s = float(mat[i, j])
            matches.append(Match(gts[i].id, prs[j].id, frame_idx + 1, s))
            sum_s += s

    tp = len(matches)
    return MatchSet(
        alpha=alpha,
        matches=tuple(matches),
        tp=tp,
        fn=len(seq.gt) - tp,
        fp=len(seq.pr) - tp,
        sum_s=sum_s,
    )


def association_counts(matches: MatchSet, seq: SequencePair) -> AssociationCounts:
    tpa: Counter[tuple[int, int]] = Counter()
    for m in matches.matches:
        tpa[(m.gt_id, m.pr_id)] += 1
    gt_total, pr_total = id_totals(seq)
    return AssociationCounts(tpa=dict(tpa), gt_total=gt_total, pr_total=pr_total)


def assoc_score(gt_id: int, pr_id: int, counts: AssociationCounts) -> float:
    """A(c) for the TP pairing gt_id with pr_id."""
    tpa = counts.tpa.get((gt_id, pr_id), 0)
    if tpa < 1:
        raise ValueError(f"({gt_id}, {pr_id}) is not a TP pair")
    return tpa / (counts.gt_total[gt_id] + counts.pr_total[pr_id] - tpa)


def tally_alpha(
    matches: MatchSet, counts: AssociationCounts, seq: SequencePair
) -> AlphaTally:
    sum_a = 0.0
    sum_assre = 0.0
    sum_asspr = 0.0
    for (g, p), tpa in counts.tpa.items():
        gt_tot = counts.gt_total[g]
        pr_tot = counts.pr_total[p]
        sum_a += tpa * (tpa / (gt_tot + pr_tot - tpa))
        sum_assre += tpa * (tpa / gt_tot)
        sum_asspr += tpa * (tpa / pr_tot)
    return AlphaTally(
        alpha=matches.alpha,
        tp=matches.tp,
        fn=matches.fn,
        fp=matches.fp,
        sum_s=matches.sum_s,
        sum_a=sum_a,
        sum_assre=sum_assre,
        sum_asspr=sum_asspr,
        num_gt=len(seq.gt),
        num_pr=len(seq.pr),
    )


def scores_from_tally(t: AlphaTally) -> AlphaScores:
    """Per-alpha scores with degenerate conventions.

    Empty gt and empty pr is vacuously perfect (all 1).  With content but
    no TPs, association and detection scores are 0 while LocA is 1.
    """
    if t.num_gt == 0 and t.num_pr == 0:
        return AlphaScores(t.alpha, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    den = t.tp + t.fn + t.fp
    deta = t.tp / den if den else 0.0
    detre = t.tp / (t.tp + t.fn) if t.tp + t.fn else 0.0
    detpr = t.tp / (t.tp + t.fp) if t.tp + t.fp else 0.0
    if t.tp:
        assa = t.sum_a / t.tp
        assre = t.sum_assre / t.tp
        asspr = t.sum_asspr / t.tp
        loca = t.sum_s / t.tp
    else:
        assa = assre = asspr = 0.0
        loca = 1.0
    hota = math.sqrt(t.sum_a / den) if den else 0.0
    return AlphaScores(t.alpha, hota, deta, assa, detre, detpr, assre, asspr, loca)


def integrate(
    records: Sequence[AlphaScores], allow_custom_grid: bool = False
) -> HotaScores:
    """Arithmetic mean of the per-alpha values over the threshold grid.

    Each field is averaged independently; DetA and AssA are combined into
    HOTA per alpha, never after averaging.
    """
    alphas = tuple(r.alpha for r in records)
    if not allow_custom_grid and alphas != CANONICAL_ALPHAS:
        raise ValueError(
            "expected the 19 canonical alpha values; pass allow_custom_grid=True "
            "for a non-canonical grid"
        )
    if not records:
        raise ValueError("no per-alpha records to integrate")
    k = len(records)
    return HotaScores(
        per_alpha=tuple(records),
        hota=sum(r.hota for r in records) / k,
        deta=sum(r.deta for r in records) / k,
        assa=sum(r.assa for r in records) / k,
        detre=sum(r.detre for r in records) / k,
        detpr=sum(r.detpr for r in records) / k,
        assre=sum(r.assre for r in records) / k,
        asspr=sum(r.asspr for r in records) / k,
        loca=sum(r.loca for r in records) / k,
    )


def evaluate_sequence(
    seq: SequencePair,
    sim: list[np.ndarray] | None = None,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
) -> tuple[HotaScores, PooledCounters]:
    """Full HOTA pipeline over the alpha grid, plus counters for pooling."""
    from .model import build_similarity

    if sim is None:
        sim = build_similarity(seq)
    tallies: list[AlphaTally] = []
    for alpha in alphas:
        matches = match_alpha(seq, sim, alpha)
        counts = association_counts(matches, seq)
        tallies.append(tally_alpha(matches, counts, seq))
    counters = PooledCounters(tuple(tallies))
    scores = integrate(
        [scores_from_tally(t) for t in tallies],
        allow_custom_grid=tuple(alphas) != CANONICAL_ALPHAS,
    )
    return scores, counters


def pool(counters: Iterable[PooledCounters]) -> HotaScores:
    """Benchmark scores from merged raw tallies (count pooling, not score
    averaging)."""
    merged: PooledCounters | None = None
    for c in counters:
        merged = c if merged is None else merged.merge(c)
    if merged is None:
        merged = PooledCounters.empty()
    records = [scores_from_tally(t) for t in merged.tallies]
    return integrate(
        records,
        allow_custom_grid=tuple(t.alpha for t in merged.tallies) != CANONICAL_ALPHAS,
    )
