"""Tracking-evaluation engine: HOTA family, CLEAR MOT, IDF1, Track-mAP."""

from .assignment import Assignment, solve_max
from .baselines import (
    ClearScores,
    IdentityScores,
    TrackMapScores,
    clear_mot,
    idf1,
    moda_decomposition,
    s_tr_detection,
    s_tr_spatiotemporal,
    track_map,
)
from .extensions import (
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
from .hota import (
    CANONICAL_ALPHAS,
    AlphaScores,
    HotaScores,
    PooledCounters,
    evaluate_sequence,
    integrate,
    match_alpha,
    pool,
)
from .io_mot import (
    load_seqmap,
    load_sequence,
    parse_class_probs,
    parse_federation_mask,
    parse_mot_file,
    write_mot_file,
)
from .model import (
    Box2D,
    Detection,
    FormatError,
    InvalidGeometryError,
    Point2D,
    SequencePair,
    build_similarity,
    iou_box,
    similarity,
)
from .oracle import alt_formulation_scores, exhaustive_hota, oracle_check
from .report import build_report, emit_report, sequence_metrics
from .scenarios import Scenario, scenario, scenario_names

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
