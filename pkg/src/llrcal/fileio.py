"""CSV score/LLR file formats and model persistence for the CLI.

Formats (UTF-8, ``.`` decimal, LF or CRLF):

* scores:  ``label,s1[,s2,...,sn]`` with labels ``ss``/``ds``
* LLRs:    ``label,llr_log10``
* pairs:   ``so_score,do_score[,group]``

Scores and LLRs are held internally in natural-log units; base-10
conversion happens here, at the file boundary.  Floats are written with
``repr`` so emitted values round-trip exactly.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError
from .evaluation import PairedScoreDb
from .logreg import CalibrationWeights

_LN10 = math.log(10.0)

SCORE_LABELS = ("ss", "ds")


def _open_rows(path):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _parse_float(text: str, path, line_no: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"{path}:{line_no}: cannot parse {column} value {text!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"{path}:{line_no}: {column} value {text!r} is not finite")
    return value


def score_base_factor(score_base: str) -> float:
    """Multiplier converting ingested scores to natural-log units."""
    if score_base == "e":
        return 1.0
    if score_base == "10":
        return _LN10
    raise DataError(f"unsupported score base {score_base!r}; use 'e' or '10'")


def read_score_csv(path, score_base: str = "e") -> tuple[list[str], np.ndarray]:
    """Read a labelled score file into (labels, (rows, n_systems) array).

    Returned scores are in natural-log units regardless of ``score_base``.
    The row array may be empty (header-only file).
    """
    factor = score_base_factor(score_base)
    rows = _open_rows(path)
    if not rows:
        raise DataError(f"{path}:1: empty file, expected a 'label,s1[,...]' header")
    header = [c.strip() for c in rows[0]]
    if not header or header[0] != "label" or len(header) < 2:
        raise DataError(
            f"{path}:1: expected header 'label,s1[,s2,...]', got {','.join(header)!r}"
        )
    n_cols = len(header) - 1
    labels: list[str] = []
    scores: list[list[float]] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != n_cols + 1:
            raise DataError(
                f"{path}:{line_no}: expected {n_cols + 1} fields, got {len(row)}"
            )
        label = row[0].strip()
        if label not in SCORE_LABELS:
            raise DataError(
                f"{path}:{line_no}: label must be 'ss' or 'ds', got {label!r}"
            )
        labels.append(label)
        scores.append(
            [
                factor * _parse_float(v, path, line_no, f"s{i + 1}")
                for i, v in enumerate(row[1:])
            ]
        )
    return labels, np.asarray(scores, dtype=float).reshape(len(labels), n_cols)


def write_score_csv(path, labels: Sequence[str], scores: np.ndarray) -> None:
    """Write natural-log-unit scores in the ``label,s1[,...]`` format."""
    scores = np.asarray(scores, dtype=float)
    if scores.ndim == 1:
        scores = scores.reshape(-1, 1)
    header = "label," + ",".join(f"s{i + 1}" for i in range(scores.shape[1]))
    lines = [header]
    for label, row in zip(labels, scores):
        lines.append(label + "," + ",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_llr_csv(path) -> tuple[list[str], np.ndarray]:
    """Read ``label,llr_log10`` and return LLRs in natural-log units."""
    rows = _open_rows(path)
    if not rows:
        raise DataError(f"{path}:1: empty file, expected a 'label,llr_log10' header")
    header = [c.strip() for c in rows[0]]
    if header != ["label", "llr_log10"]:
        raise DataError(
            f"{path}:1: expected header 'label,llr_log10', got {','.join(header)!r}"
        )
    labels: list[str] = []
    llrs: list[float] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{path}:{line_no}: expected 2 fields, got {len(row)}")
        label = row[0].strip()
        if label not in SCORE_LABELS:
            raise DataError(
                f"{path}:{line_no}: label must be 'ss' or 'ds', got {label!r}"
            )
        labels.append(label)
        llrs.append(_LN10 * _parse_float(row[1], path, line_no, "llr_log10"))
    return labels, np.asarray(llrs, dtype=float)


def write_llr_csv(path, labels: Sequence[str], llrs_natural: Sequence[float]) -> None:
    """Write natural-log LLRs as base-10 ``label,llr_log10`` rows."""
    lines = ["label,llr_log10"]
    for label, llr in zip(labels, llrs_natural):
        lines.append(f"{label},{float(llr) / _LN10!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pairs_csv(path, score_base: str = "e") -> PairedScoreDb:
    """Read ``so_score,do_score[,group]`` into a paired score database."""
    factor = score_base_factor(score_base)
    rows = _open_rows(path)
    if not rows:
        raise DataError(
            f"{path}:1: empty file, expected a 'so_score,do_score[,group]' header"
        )
    header = [c.strip() for c in rows[0]]
    if header not in (["so_score", "do_score"], ["so_score", "do_score", "group"]):
        raise DataError(
            f"{path}:1: expected header 'so_score,do_score[,group]', "
            f"got {','.join(header)!r}"
        )
    has_group = len(header) == 3
    pairs = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(
                f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}"
            )
        so_score = factor * _parse_float(row[0], path, line_no, "so_score")
        do_score = factor * _parse_float(row[1], path, line_no, "do_score")
        if has_group:
            group = row[2].strip()
            pairs.append((so_score, do_score, group if group else None))
        else:
            pairs.append((so_score, do_score))
    if not pairs:
        raise DataError(f"{path}: no data rows")
    return PairedScoreDb(pairs)


def read_model_json(path) -> CalibrationWeights:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return CalibrationWeights.from_json(text)


def write_model_json(path, weights: CalibrationWeights) -> None:
    Path(path).write_text(weights.to_json(), encoding="utf-8")
