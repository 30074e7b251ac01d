"""Score-report assembly and serialization.

Pooled values are recomputed from merged raw counters, never averaged from
per-sequence scores.  Report assembly is an ordered reduction, so output
bytes do not depend on the degree of parallelism.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import baselines, extensions as ext
from .hota import CANONICAL_ALPHAS, PooledCounters, evaluate_sequence, pool
from .model import SequencePair, build_similarity

DEFAULT_METRICS = ("hota", "clear", "identity")
KNOWN_METRICS = DEFAULT_METRICS + (
    "trackmap", "ext:ohota", "ext:fa", "ext:whota", "ext:ca", "ext:ca2",
    "ext:fed", "ext:cr",
)


def _hota_fields(scores) -> dict[str, float]:
    return {
        "HOTA": scores.hota,
        "DetA": scores.deta,
        "AssA": scores.assa,
        "DetRe": scores.detre,
        "DetPr": scores.detpr,
        "AssRe": scores.assre,
        "AssPr": scores.asspr,
        "LocA": scores.loca,
    }


def sequence_metrics(
    seq: SequencePair,
    alphas: Sequence[float] = CANONICAL_ALPHAS,
    metrics: Sequence[str] = DEFAULT_METRICS,
    class_probs=None,
    fed_mask=None,
) -> tuple[dict, PooledCounters, dict[str, float]]:
    """Flat per-sequence metric mapping, pooling counters and pooled-curve
    inputs for one sequence."""
    for m in metrics:
        if m not in KNOWN_METRICS:
            raise ValueError(f"unknown metric {m!r}; known: {', '.join(KNOWN_METRICS)}")
    sim = build_similarity(seq)
    out: dict[str, float] = {}
    scores, counters = evaluate_sequence(seq, sim, alphas)
    if "hota" in metrics:
        out.update(_hota_fields(scores))
    clear = baselines.clear_mot(seq, sim)
    if "clear" in metrics:
        out.update({
            "MOTA": clear.mota, "MOTP": clear.motp, "MODA": clear.moda,
            "TP": clear.tp, "FN": clear.fn, "FP": clear.fp,
            "IDSW": clear.idsw, "IDTR": clear.idtr,
        })
    ident = baselines.idf1(seq, sim)
    if "identity" in metrics:
        out.update({
            "IDF1": ident.idf1, "IDR": ident.id_recall, "IDP": ident.id_precision,
            "IDTP": ident.idtp, "IDFN": ident.idfn, "IDFP": ident.idfp,
        })
    if "trackmap" in metrics:
        out["Track-mAP"] = baselines.track_map(seq).map
    if "ext:ohota" in metrics:
        out["OHOTA"] = ext.ohota(seq, sim, alphas).hota
    if "ext:fa" in metrics:
        fa_scores, fraga = ext.fa_hota(seq, sim, alphas)
        out["FA-HOTA"] = fa_scores.hota
        out["FragA"] = fraga.integrated
    if "ext:whota" in metrics:
        out["W-HOTA"] = ext.w_hota(seq, sim, alphas=alphas).hota
    if "ext:ca" in metrics:
        ca_scores, claa = ext.ca_hota(seq, sim, class_probs, alphas)
        out["CA-HOTA"] = ca_scores.hota
        out["ClaA"] = claa.integrated
    if "ext:ca2" in metrics:
        out["CA2-HOTA"] = ext.ca2_hota(seq, sim, class_probs, alphas).mean
    if "ext:fed" in metrics:
        out["Fed-HOTA"] = ext.fed_hota(seq, sim, class_probs, fed_mask, alphas).mean
    clear_raw = {
        "tp": clear.tp, "fn": clear.fn, "fp": clear.fp,
        "idsw": clear.idsw, "idtr": clear.idtr,
        "num_gt": len(seq.gt), "sum_s": clear.motp * clear.tp,
        "idtp": ident.idtp, "idfn": ident.idfn, "idfp": ident.idfp,
    }
    return out, counters, clear_raw


def _worker(args):
    return sequence_metrics(*args)


def build_report(
    seqs: Sequence[SequencePair],
    alphas: Sequence[float] = CANONICAL_ALPHAS,
    metrics: Sequence[str] = DEFAULT_METRICS,
    jobs: int = 1,
    class_probs=None,
    fed_mask=None,
) -> dict:
    tasks = [(seq, tuple(alphas), tuple(metrics), class_probs, fed_mask)
             for seq in seqs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool_exec:
            results = list(pool_exec.map(_worker, tasks))
    else:
        results = [_worker(t) for t in tasks]

    report: dict = {
        "alphas": list(alphas),
        "non_canonical": tuple(alphas) != CANONICAL_ALPHAS,
        "sequences": {},
    }
    counters: list[PooledCounters] = []
    raw = {"tp": 0, "fn": 0, "fp": 0, "idsw": 0, "idtr": 0, "num_gt": 0,
           "sum_s": 0.0, "idtp": 0, "idfn": 0, "idfp": 0}
    for seq, (out, c, cr) in zip(seqs, results):
        report["sequences"][seq.name] = out
        counters.append(c)
        for k in raw:
            raw[k] += cr[k]

    pooled: dict[str, float] = {}
    if counters:
        pooled_hota = pool(counters)
    else:
        pooled_hota = pool([PooledCounters.empty(tuple(alphas))])
    if "hota" in metrics:
        pooled.update(_hota_fields(pooled_hota))
    if "clear" in metrics:
        errors = raw["fn"] + raw["fp"] + raw["idsw"]
        den = raw["num_gt"] if raw["num_gt"] else 1
        pooled.update({
            "MOTA": 1.0 - errors / den,
            "MOTP": raw["sum_s"] / raw["tp"] if raw["tp"] else 1.0,
            "MODA": 1.0 - (raw["fn"] + raw["fp"]) / den,
            "TP": raw["tp"], "FN": raw["fn"], "FP": raw["fp"],
            "IDSW": raw["idsw"], "IDTR": raw["idtr"],
        })
    if "identity" in metrics:
        idtp, idfn, idfp = raw["idtp"], raw["idfn"], raw["idfp"]
        total = idtp + 0.5 * idfn + 0.5 * idfp
        pooled.update({
            "IDF1": idtp / total if total else 1.0,
            "IDR": idtp / (idtp + idfn) if idtp + idfn else 1.0,
            "IDP": idtp / (idtp + idfp) if idtp + idfp else 1.0,
            "IDTP": idtp, "IDFN": idfn, "IDFP": idfp,
        })
    if "ext:cr" in metrics:
        pooled["CR-HOTA"] = ext.cr_hota(seqs, alphas)
    report["pooled"] = pooled
    report["curves"] = {
        "alpha": list(pooled_hota.alphas),
        "HOTA": [s.hota for s in pooled_hota.per_alpha],
        "DetA": [s.deta for s in pooled_hota.per_alpha],
        "AssA": [s.assa for s in pooled_hota.per_alpha],
        "DetRe": [s.detre for s in pooled_hota.per_alpha],
        "DetPr": [s.detpr for s in pooled_hota.per_alpha],
        "AssRe": [s.assre for s in pooled_hota.per_alpha],
        "AssPr": [s.asspr for s in pooled_hota.per_alpha],
        "LocA": [s.loca for s in pooled_hota.per_alpha],
    }
    return report


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.6f}"


def emit_report(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report, indent=2) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    keys: list[str] = []
    rows = list(report["sequences"].items()) + [("POOLED", report["pooled"])]
    for _, vals in rows:
        for k in vals:
            if k not in keys:
                keys.append(k)
    lines = ["sequence," + ",".join(keys)]
    for name, vals in rows:
        lines.append(name + "," + ",".join(
            _fmt(vals[k]) if k in vals else "" for k in keys
        ))
    curves = report.get("curves")
    if curves:
        lines.append("")
        curve_keys = list(curves)
        lines.append(",".join(curve_keys))
        for i in range(len(curves["alpha"])):
            lines.append(",".join(_fmt(curves[k][i]) for k in curve_keys))
    return ("\n".join(lines) + "\n").encode()
