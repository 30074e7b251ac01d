"""End-to-end acceptance checks.

Each test covers one numbered criterion and prints a single PASS/FAIL line
with the criterion number so a full run doubles as a checklist.
"""

import functools
import json
import math
import random
import time

import pytest

from trackscore.baselines import clear_mot, idf1
from trackscore.cli import main as cli_main
from trackscore.extensions import (
    ClassProbs,
    FederationMask,
    Weights,
    ca2_hota,
    ca_hota,
    cr_hota,
    fa_hota,
    fed_hota,
    ohota,
    w_hota,
)
from trackscore.hota import assoc_score, association_counts, evaluate_sequence, match_alpha
from trackscore.model import build_similarity
from trackscore.oracle import alt_formulation_scores, oracle_check, random_sequence
from trackscore.scenarios import scenario

from conftest import det, make_seq


def criterion(num, desc):
    """Decorator printing one pass/fail line per criterion."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {num:02d} FAIL: {desc}")
                raise
            print(f"criterion {num:02d} PASS: {desc}")

        return run

    return wrap


def full_eval(seq):
    scores, _ = evaluate_sequence(seq)
    sim = build_similarity(seq)
    return scores, clear_mot(seq, sim), idf1(seq, sim)


@criterion(1, "identity switch penalty shrinks with frame rate under MOTA, "
              "not under HOTA")
def test_criterion_01():
    start = time.perf_counter()
    hotas = []
    for k, mota in ((10, 0.90), (100, 0.99)):
        seq = scenario("frame_rate", k=k).seq
        scores, clear, _ = full_eval(seq)
        assert clear.mota == pytest.approx(mota, abs=1e-12)
        assert scores.hota == pytest.approx(1 / math.sqrt(2), abs=1e-9)
        hotas.append(scores.hota)
    assert abs(hotas[0] - hotas[1]) <= 1e-9
    assert time.perf_counter() - start < 1.0


@criterion(2, "association score of a drifting track is TPA over "
              "TPA+FNA+FPA")
def test_criterion_02():
    seq = scenario("drifting_track").seq
    sim = build_similarity(seq)
    ms = match_alpha(seq, sim, 0.5)
    counts = association_counts(ms, seq)
    tpa = counts.tpa[(1, 1)]
    fna = counts.gt_total[1] - tpa
    fpa = counts.pr_total[1] - tpa
    assert (tpa, fna, fpa) == (5, 3, 4)
    assert assoc_score(1, 1, counts) == pytest.approx(5 / 12, abs=1e-12)


@criterion(3, "splitting an object is penalized by MOTA while merging two "
              "objects is not")
def test_criterion_03():
    split = clear_mot(*_with_sim(scenario("two_frame_split").seq))
    assert split.mota == pytest.approx(0.5, abs=1e-12)
    assert split.idsw == 1
    merge = clear_mot(*_with_sim(scenario("two_frame_merge").seq))
    assert merge.mota == pytest.approx(1.0, abs=1e-12)
    assert merge.idsw == 0
    assert merge.idtr == 1


def _with_sim(seq):
    return seq, build_similarity(seq)


@criterion(4, "recovering a lost identity helps HOTA but double-counts "
              "under MOTA")
def test_criterion_04():
    res = {v: full_eval(scenario("self_correct", variant=v).seq)
           for v in ("A", "B", "C")}
    assert res["A"][1].mota == pytest.approx(res["C"][1].mota, abs=1e-12)
    assert res["A"][1].mota < res["B"][1].mota
    assert res["A"][0].hota > res["B"][0].hota > res["C"][0].hota
    for v, expected in (("A", 5 / 9), ("B", 1 / 2), ("C", 1 / 3)):
        assert res[v][0].assa == pytest.approx(expected, abs=1e-12)


@criterion(5, "HOTA rewards better-aligned splits that MOTA cannot tell "
              "apart")
def test_criterion_05():
    res = {v: full_eval(scenario("alignment", variant=v).seq)
           for v in ("A", "B", "C")}
    assert res["A"][1].mota == pytest.approx(res["B"][1].mota, abs=1e-12)
    assert res["B"][1].mota == pytest.approx(res["C"][1].mota, abs=1e-12)
    assert res["C"][0].hota > res["B"][0].hota > res["A"][0].hota


@criterion(6, "adding correct second-half detections never lowers HOTA but "
              "halves IDF1")
def test_criterion_06():
    half_scores, _, half_id = full_eval(
        scenario("detection_decrease", variant="half").seq
    )
    full_scores, _, full_id = full_eval(
        scenario("detection_decrease", variant="full").seq
    )
    assert half_id.idf1 == pytest.approx(2 / 3, abs=1e-12)
    assert full_id.idf1 == pytest.approx(1 / 2, abs=1e-12)
    assert full_scores.hota >= half_scores.hota - 1e-9
    assert full_scores.hota == pytest.approx(1 / math.sqrt(2), abs=1e-9)


@criterion(7, "IDF1 ignores how badly the second half fragments; HOTA "
              "strictly decreases")
def test_criterion_07():
    hotas = []
    for m in (1, 2, 4, 8):
        scores, _, ident = full_eval(scenario("association_ignored", m=m).seq)
        assert ident.idf1 == pytest.approx(0.5, abs=1e-12)
        hotas.append(scores.hota)
    assert all(a > b + 1e-12 for a, b in zip(hotas, hotas[1:]))


@criterion(8, "only the Jaccard association formulation keeps better "
              "detection monotonically better")
def test_criterion_08():
    start = time.perf_counter()
    f1_violated = False
    for i in range(1, 20):
        ratio = i / 20
        seq_a = scenario("coverage_monotonic", ratio=ratio, variant="A").seq
        seq_b = scenario("coverage_monotonic", ratio=ratio, variant="B").seq
        for swap in (False, True):
            if swap:
                a = make_seq(seq_a.num_frames, seq_a.pr, seq_a.gt, name="a")
                b = make_seq(seq_b.num_frames, seq_b.pr, seq_b.gt, name="b")
            else:
                a, b = seq_a, seq_b
            jac_a = alt_formulation_scores(a, formulation="jaccard")
            jac_b = alt_formulation_scores(b, formulation="jaccard")
            assert jac_a >= jac_b - 1e-12, (ratio, swap)
            if (alt_formulation_scores(a, formulation="f1")
                    < alt_formulation_scores(b, formulation="f1") - 1e-12):
                f1_violated = True
    assert f1_violated
    assert time.perf_counter() - start < 5.0


@criterion(9, "matching equals exhaustive enumeration on 200 random "
              "instances")
def test_criterion_09():
    rep = oracle_check(trials=200, seed=0, alphas=(0.25, 0.5, 0.75))
    assert rep.max_abs_diff <= 1e-9
    assert rep.elapsed_seconds < 60.0


@criterion(10, "structural identities: score decomposition, single-object "
               "reduction, gt/pr symmetry")
def test_criterion_10():
    # Decomposition on deterministic fixtures.
    for name, params in (("self_correct", {"variant": "A"}),
                         ("fragmentation", {"variant": "B"}),
                         ("drifting_track", {})):
        scores, _ = evaluate_sequence(scenario(name, **params).seq)
        for per in scores.per_alpha:
            assert per.hota == pytest.approx(
                math.sqrt(per.deta * per.assa), abs=1e-12
            )
            if per.detre > 0 and per.detpr > 0:
                assert per.deta == pytest.approx(
                    1 / (1 / per.detre + 1 / per.detpr - 1), abs=1e-12
                )
    # Single gt track, single pr track: double score collapses to the
    # detection Jaccard.
    gt = [det(f, 1) for f in range(1, 7)]
    pr = [det(f, 1) for f in (1, 2, 3, 8)]
    sot, _ = evaluate_sequence(make_seq(8, gt, pr))
    for per in sot.per_alpha:
        assert per.hota == pytest.approx(per.deta, abs=1e-12)
    # Swapping gt and pr on 100 random instances.
    for seed in range(100):
        seq = random_sequence(random.Random(seed), max_frames=4, max_dets=4)
        swapped = make_seq(seq.num_frames, seq.pr, seq.gt, name="sw")
        a, _ = evaluate_sequence(seq, alphas=(0.25, 0.5, 0.75))
        b, _ = evaluate_sequence(swapped, alphas=(0.25, 0.5, 0.75))
        assert a.hota == pytest.approx(b.hota, abs=1e-12)
        assert a.detre == pytest.approx(b.detpr, abs=1e-12)
        assert a.assre == pytest.approx(b.asspr, abs=1e-12)


@criterion(11, "extension metrics agree with their reductions")
def test_criterion_11():
    # Weighted variant, all-ones weights: bit identical.
    seq = scenario("drifting_track").seq
    sim = build_similarity(seq)
    plain, _ = evaluate_sequence(seq, sim)
    weighted = w_hota(seq, sim, Weights())
    for a, b in zip(plain.per_alpha, weighted.per_alpha):
        assert a.hota == b.hota and a.assa == b.assa and a.deta == b.deta

    # Fragmentation-aware: equality without fragmentation, never above.
    contiguous = make_seq(6, [det(f, 1) for f in range(1, 7)],
                          [det(f, 1) for f in range(1, 7)])
    fa, _ = fa_hota(contiguous, build_similarity(contiguous))
    base, _ = evaluate_sequence(contiguous)
    assert fa.hota == pytest.approx(base.hota, abs=1e-12)
    for seed in range(100):
        rnd_seq = random_sequence(random.Random(11_000 + seed))
        rnd_sim = build_similarity(rnd_seq)
        fa_r, _ = fa_hota(rnd_seq, rnd_sim, (0.25, 0.5, 0.75))
        base_r, _ = evaluate_sequence(rnd_seq, rnd_sim, (0.25, 0.5, 0.75))
        for x, y in zip(fa_r.per_alpha, base_r.per_alpha):
            assert x.hota <= y.hota + 1e-12

    # Classification-aware with one-hot correct probabilities: identical.
    classed = make_seq(
        10,
        [det(f, 1, class_id=3) for f in range(1, 11)],
        [det(f, 1) for f in range(1, 6)] + [det(f, 2) for f in range(6, 11)],
        name="classed",
    )
    classed_sim = build_similarity(classed)
    onehot = ClassProbs({(d.frame, d.id): {3: 1.0} for d in classed.pr})
    ca, claa = ca_hota(classed, classed_sim, onehot)
    classed_plain, _ = evaluate_sequence(classed, classed_sim)
    for a, b in zip(classed_plain.per_alpha, ca.per_alpha):
        assert a.hota == b.hota
    assert claa.integrated == 1.0

    # Federated evaluation with a full mask reduces to the class-averaged
    # variant.
    mask = FederationMask.full(range(1, 11), [3])
    assert fed_hota(classed, classed_sim, onehot, mask) == ca2_hota(
        classed, classed_sim, onehot
    )

    # Online variant forgives the not-yet-seen future of a switch.
    online = ohota(scenario("frame_rate", k=10).seq)
    assert online.assa == pytest.approx(0.6772, abs=1e-4)

    # Confidence-ranked with a single threshold and full recall is the
    # plain integrated score.
    single = scenario("alignment", variant="B").seq
    single_scores, _ = evaluate_sequence(single)
    assert cr_hota([single]) == pytest.approx(single_scores.hota, abs=1e-12)


@criterion(12, "report bytes are identical across repeats and degrees of "
               "parallelism")
def test_criterion_12(tmp_path):
    for name, params in (("frame_rate", ["k=10"]), ("fragmentation", [])):
        args = ["scenarios", "--name", name, "--out", str(tmp_path / name)]
        for p in params:
            args += ["--param", p]
        assert cli_main(args) == 0
    gt, res = tmp_path / "gt", tmp_path / "res"
    gt.mkdir(), res.mkdir()
    lines = []
    for name in ("frame_rate", "fragmentation"):
        bench = tmp_path / name
        for f in (bench / "gt").iterdir():
            (gt / f.name).write_bytes(f.read_bytes())
        for f in (bench / "results").iterdir():
            (res / f.name).write_bytes(f.read_bytes())
        lines.append((bench / "seqmap.txt").read_text().strip())
    (tmp_path / "seqmap.txt").write_text("\n".join(lines) + "\n")
    payloads = []
    for jobs in ("1", "1", "3"):
        out = tmp_path / f"r{len(payloads)}.json"
        assert cli_main([
            "eval", "--gt", str(gt), "--results", str(res),
            "--seqmap", str(tmp_path / "seqmap.txt"),
            "--jobs", jobs, "--out", str(out),
        ]) == 0
        payloads.append(out.read_bytes())
    assert payloads[0] == payloads[1] == payloads[2]
    report = json.loads(payloads[0])
    assert set(report["sequences"]) == {"frame_rate", "fragmentation_A"}
