"""System validity evaluation: Cllr, Tippett curves, cross-validation.

Cllr is the equal-prior-weighted cross-entropy of the output log LRs in
bits: 1 for a system that always outputs LR = 1, lower is better, and it
penalizes both poor discrimination and poor calibration.  Tippett curves
show, per class, the proportion of log LRs at or above each threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DataError, LlrcalError
from .gaussian_map import LabeledScores
from .logreg import DEFAULT_CONFIG, TrainConfig, apply, train_calibration

_LN2 = math.log(2.0)
_LN10 = math.log(10.0)

TIPPETT_CSV_HEADER = "threshold_log10lr,so_ge_proportion,do_ge_proportion"

#: Default number of thresholds for Tippett curves; enough for smooth plots.
DEFAULT_N_THRESHOLDS = 201


def _as_finite_1d(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size and not np.all(np.isfinite(arr)):
        raise DataError(f"{what} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LlrSet:
    """Natural-log LRs from same-origin and different-origin test comparisons."""

    so: np.ndarray
    do: np.ndarray

    def __init__(self, so: Sequence[float], do: Sequence[float]):
        object.__setattr__(self, "so", _as_finite_1d(so, "same-origin LLRs"))
        object.__setattr__(self, "do", _as_finite_1d(do, "different-origin LLRs"))


@dataclass(frozen=True, eq=False)
class TippettCurve:
    """Survival-convention Tippett curve sampled on a threshold grid.

    Thresholds are base-10 log LRs, strictly increasing; each proportion
    column is the fraction of that class's LLRs at or above the threshold,
    so both columns are non-increasing.
    """

    thresholds: np.ndarray
    so_proportions: np.ndarray
    do_proportions: np.ndarray

    def __init__(self, thresholds, so_proportions, do_proportions):
        t = _as_finite_1d(thresholds, "thresholds")
        p_so = _as_finite_1d(so_proportions, "so proportions")
        p_do = _as_finite_1d(do_proportions, "do proportions")
        if not (t.size == p_so.size == p_do.size):
            raise DataError("curve columns must have equal length")
        if not np.all(np.diff(t) > 0):
            raise DataError("thresholds must be strictly increasing")
        for name, p in (("so", p_so), ("do", p_do)):
            if np.any(p < 0) or np.any(p > 1):
                raise DataError(f"{name} proportions must lie in [0, 1]")
            if np.any(np.diff(p) > 0):
                raise DataError(f"{name} proportions must be non-increasing")
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "so_proportions", p_so)
        object.__setattr__(self, "do_proportions", p_do)

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(
            zip(
                self.thresholds.tolist(),
                self.so_proportions.tolist(),
                self.do_proportions.tolist(),
            )
        )

    def to_csv(self) -> str:
        lines = [TIPPETT_CSV_HEADER]
        for t, p_so, p_do in self.points:
            lines.append(f"{t!r},{p_so!r},{p_do!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PairedScoreDb:
    """Paired same-origin/different-origin scores for cross-validation.

    Each entry holds the two scores generated for one test item; group ids,
    when given, tie together entries that must never appear in a training
    fold alongside each other (e.g. resamples of the same source item).
    """

    pairs: tuple[tuple[float, float, Optional[str]], ...]

    def __init__(self, pairs: Sequence[Sequence]):
        norm = []
        for entry in pairs:
            entry = tuple(entry)
            if len(entry) == 2:
                so_score, do_score = entry
                group = None
            elif len(entry) == 3:
                so_score, do_score, group = entry
                group = None if group is None else str(group)
            else:
                raise DataError(
                    "each pair must be (so_score, do_score) or "
                    "(so_score, do_score, group)"
                )
            so_score, do_score = float(so_score), float(do_score)
            if not (math.isfinite(so_score) and math.isfinite(do_score)):
                raise DataError("pair scores must be finite")
            norm.append((so_score, do_score, group))
        if not norm:
            raise DataError("paired score database must be non-empty")
        object.__setattr__(self, "pairs", tuple(norm))

    def __len__(self) -> int:
        return len(self.pairs)


def cllr(llrs: LlrSet) -> float:
    """Log-likelihood-ratio cost in bits; lower is better.

    Cllr = 1/2 [ mean_so log2(1 + e^-llr) + mean_do log2(1 + e^llr) ]
    with llr in natural-log units.  Overflow-safe; exactly 1 when every
    llr is 0.
    """
    if llrs.so.size == 0 or llrs.do.size == 0:
        raise DataError("Cllr needs at least one LLR in each class")
    so_term = float(np.mean(np.logaddexp(0.0, -llrs.so)))
    do_term = float(np.mean(np.logaddexp(0.0, llrs.do)))
    return 0.5 * (so_term + do_term) / _LN2


def proportion_ge(values: np.ndarray, threshold: float) -> float:
    """Fraction of values at or above a threshold; 0 for an empty class."""
    if values.size == 0:
        return 0.0
    return float(np.count_nonzero(values >= threshold)) / values.size


def tippett_curve(
    llrs: LlrSet, n_thresholds: int = DEFAULT_N_THRESHOLDS
) -> TippettCurve:
    """Sample both survival curves on an even base-10 threshold grid.

    The grid spans the pooled range of the base-10 LLRs plus a margin, so
    the curves start at 1 (every value above the lowest threshold) and end
    at 0 (none above the highest).
    """
    if n_thresholds < 2:
        raise DataError(f"need at least 2 thresholds, got {n_thresholds}")
    so10 = llrs.so / _LN10
    do10 = llrs.do / _LN10
    pooled = np.concatenate([so10, do10])
    if pooled.size == 0:
        raise DataError("Tippett curve needs at least one LLR")
    lo, hi = float(pooled.min()), float(pooled.max())
    margin = max(0.5, 0.05 * (hi - lo))
    thresholds = np.linspace(lo - margin, hi + margin, n_thresholds)
    so_prop = np.array([proportion_ge(so10, t) for t in thresholds])
    do_prop = np.array([proportion_ge(do10, t) for t in thresholds])
    return TippettCurve(thresholds, so_prop, do_prop)


class FoldTrainingError(LlrcalError):
    """Training failed on one cross-validation fold."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"training failed on fold {fold}: {cause}")
        self.fold = fold


def crossval_calibrate(
    db: PairedScoreDb,
    config: TrainConfig = DEFAULT_CONFIG,
    on_fold: Optional[Callable[[int, Sequence[int]], None]] = None,
) -> LlrSet:
    """Leave-one-pair-out calibration of every score in the database.

    For each pair, calibration weights are trained from scratch on all
    remaining pairs -- excluding every pair that shares the held-out
    pair's group, when groups are present -- and applied to the held-out
    pair's two scores.  Outputs keep the input pair order.  ``on_fold``,
    if given, receives (fold_index, training_pair_indices) for each fold
    so callers can audit the protocol.
    """
    pairs = db.pairs
    if len(pairs) < 3:
        raise DataError(f"cross-validation needs at least 3 pairs, got {len(pairs)}")
    so_out = np.empty(len(pairs))
    do_out = np.empty(len(pairs))
    for k, (so_score, do_score, group) in enumerate(pairs):
        if group is None:
            train_idx = [i for i in range(len(pairs)) if i != k]
        else:
            train_idx = [i for i, p in enumerate(pairs) if p[2] != group]
        if on_fold is not None:
            on_fold(k, tuple(train_idx))
        train = LabeledScores(
            so=[pairs[i][0] for i in train_idx],
            do=[pairs[i][1] for i in train_idx],
        )
        try:
            weights = train_calibration(train, config)
        except LlrcalError as exc:
            raise FoldTrainingError(k, exc) from exc
        so_out[k] = apply(weights, [so_score])
        do_out[k] = apply(weights, [do_score])
    return LlrSet(so=so_out, do=do_out)
