"""Optimal linear assignment used by every matching procedure.

Scores are maximized.  Ineligible cells are marked with NaN (the sentinel)
and are never selected, independent of the magnitude of the other entries.
Ties between optimal pairings are broken deterministically, preferring the
lexicographically first pairing by row index, then column index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

INELIGIBLE = float("nan")

_REL_TOL = 1e-9
_ABS_TOL = 1e-9


@dataclass(frozen=True)
class Assignment:
    pairs: tuple[tuple[int, int], ...]
    objective: float


def solve_max(score: np.ndarray) -> Assignment:
    """Maximum-score bijective pairing over the eligible cells of `score`.

    For an all-eligible matrix the pairing has size min(rows, cols).  With
    NaN sentinels, only eligible cells may be paired and pairs that would
    lower the objective are dropped.  Empty matrices yield an empty
    Assignment.
    """
    score = np.asarray(score, dtype=float)
    if score.ndim != 2:
        raise ValueError(f"score must be a matrix, got shape {score.shape}")
    rows, cols = score.shape
    if rows == 0 or cols == 0:
        return Assignment(pairs=(), objective=0.0)
    eligible = ~np.isnan(score)
    forced_full = bool(eligible.all())
    best = _solve_value(score, eligible, forced_full)
    pairs = _lexicographic_pairs(score, eligible, forced_full, best)
    return Assignment(pairs=tuple(pairs), objective=best)


def _solve_value(score: np.ndarray, eligible: np.ndarray, forced_full: bool) -> float:
    rows, cols = score.shape
    if rows == 0 or cols == 0:
        return 0.0
    if forced_full:
        r, c = linear_sum_assignment(score, maximize=True)
        return float(score[r, c].sum())
    # Square augmentation: dummy columns/rows absorb unmatched real rows/cols
    # at zero cost; ineligible real cells are forbidden outright.
    n = rows + cols
    cost = np.full((n, n), np.inf)
    real = np.where(eligible, -score, np.inf)
    cost[:rows, :cols] = real
    for i in range(rows):
        cost[i, cols + i] = 0.0
    for j in range(cols):
        cost[rows + j, j] = 0.0
    cost[rows:, cols:] = 0.0
    r, c = linear_sum_assignment(cost)
    total = 0.0
    for i, j in zip(r, c):
        if i < rows and j < cols:
            total += score[i, j]
    return float(total)


def _lexicographic_pairs(
    score: np.ndarray, eligible: np.ndarray, forced_full: bool, best: float
) -> list[tuple[int, int]]:
    """Greedily fix pairs row by row, keeping the optimum attainable."""
    rows, cols = score.shape
    free_cols = list(range(cols))
    unmatched_budget = max(0, rows - cols) if forced_full else rows
    pairs: list[tuple[int, int]] = []
    fixed = 0.0
    for i in range(rows):
        sub_rows = list(range(i + 1, rows))
        chosen: int | None = None
        for j in free_cols:
            if not eligible[i, j]:
                continue
            rest_cols = [c for c in free_cols if c != j]
            rest = _solve_value(
                score[np.ix_(sub_rows, rest_cols)] if sub_rows and rest_cols
                else np.zeros((len(sub_rows), len(rest_cols))),
                eligible[np.ix_(sub_rows, rest_cols)] if sub_rows and rest_cols
                else np.ones((len(sub_rows), len(rest_cols)), dtype=bool),
                forced_full,
            )
            if math.isclose(fixed + score[i, j] + rest, best,
                            rel_tol=_REL_TOL, abs_tol=_ABS_TOL):
                chosen = j
                break
        if chosen is None:
            if unmatched_budget <= 0:
                raise RuntimeError("assignment refinement failed to reach optimum")
            unmatched_budget -= 1
        else:
            pairs.append((i, chosen))
            fixed += score[i, chosen]
            free_cols.remove(chosen)
    return pairs
