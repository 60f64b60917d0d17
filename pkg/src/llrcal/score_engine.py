"""Likelihood ratios from raw univariate data.

Suspect and background distributions are modelled either as single
Gaussians or as Gaussian mixtures; the likelihood ratio at an observed
value is the ratio of the two model densities there.  Per-point log LRs
from a multi-point sample are averaged into a score, which downstream
calibration then maps to an interpretable log likelihood ratio.

All log LRs here are natural-log; conversion to base 10 happens only at
presentation boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError

#: Saturation bound (natural log) for mixture log LRs whose densities
#: underflow the log domain; keeps downstream means and optimizers finite.
LOG_LR_CAP = 200.0

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class GaussianParams:
    """Single-Gaussian density model in raw-data units."""

    mean: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)):
            raise DataError("Gaussian parameters must be finite")
        if self.sd <= 0.0:
            raise DataError(f"sd must be strictly positive, got {self.sd}")


@dataclass(frozen=True)
class Gmm:
    """Gaussian mixture: components are (weight, mean, sd) triples.

    Weights must be in (0, 1] and sum to 1 within 1e-12.
    """

    components: tuple[tuple[float, float, float], ...]

    def __init__(self, components: Sequence[Sequence[float]]):
        comps = tuple(
            (float(w), float(m), float(s)) for w, m, s in components
        )
        if not comps:
            raise DataError("mixture needs at least one component")
        for w, m, s in comps:
            if not (math.isfinite(w) and math.isfinite(m) and math.isfinite(s)):
                raise DataError("mixture parameters must be finite")
            if not 0.0 < w <= 1.0:
                raise DataError(f"component weight must be in (0, 1], got {w}")
            if s <= 0.0:
                raise DataError(f"component sd must be strictly positive, got {s}")
        total = math.fsum(w for w, _, _ in comps)
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise DataError(f"component weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_gaussian(cls, params: GaussianParams) -> "Gmm":
        return cls([(1.0, params.mean, params.sd)])


@dataclass(frozen=True)
class OffenderData:
    """Raw data points from the questioned-origin sample."""

    points: tuple[float, ...]

    def __init__(self, points: Sequence[float]):
        pts = tuple(float(p) for p in points)
        if not pts:
            raise DataError("offender data must be non-empty")
        if not all(math.isfinite(p) for p in pts):
            raise DataError("offender data must be finite")
        object.__setattr__(self, "points", pts)


def _normal_logpdf(x: float, mean: float, sd: float) -> float:
    z = (x - mean) / sd
    return -0.5 * z * z - math.log(sd) - _LOG_SQRT_2PI


def _require_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DataError(f"data value must be finite, got {x}")
    return x


def fit_gaussian(samples: Sequence[float]) -> GaussianParams:
    """Moment fit: arithmetic mean and unbiased (n-1) standard deviation.

    Rejects fewer than two samples or zero variance as degenerate.
    """
    vals = [_require_finite(v) for v in samples]
    n = len(vals)
    if n < 2:
        raise DataError(f"need at least 2 samples to fit a Gaussian, got {n}")
    mean = math.fsum(vals) / n
    ss = math.fsum((v - mean) ** 2 for v in vals)
    if ss == 0.0:
        raise DataError("degenerate data: all samples identical (zero variance)")
    return GaussianParams(mean=mean, sd=math.sqrt(ss / (n - 1)))


def gaussian_lr(x: float, suspect: GaussianParams, background: GaussianParams) -> float:
    """Natural-log LR of ``x`` under single-Gaussian suspect vs background models.

    Computed in the log domain, so there is no pdf underflow even far out
    in the tails (|x - mean|/sd of 30 and well beyond).
    """
    x = _require_finite(x)
    return _normal_logpdf(x, suspect.mean, suspect.sd) - _normal_logpdf(
        x, background.mean, background.sd
    )


def gmm_logpdf(x: float, model: Gmm) -> float:
    """Log density of a Gaussian mixture, via log-sum-exp over components."""
    x = _require_finite(x)
    terms = [
        math.log(w) + _normal_logpdf(x, m, s) for w, m, s in model.components
    ]
    hi = max(terms)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(math.fsum(math.exp(t - hi) for t in terms))


def gmm_pdf(x: float, model: Gmm) -> float:
    """Mixture density at ``x`` (weighted sum of component Gaussians)."""
    return math.exp(gmm_logpdf(x, model))


def _min_standardized_distance(x: float, model: Gmm) -> float:
    return min(abs(x - m) / s for _, m, s in model.components)


def gmm_lr(x: float, suspect: Gmm, background: Gmm) -> float:
    """Natural-log LR under Gaussian-mixture suspect vs background models.

    Saturates at +/-LOG_LR_CAP instead of returning infinities when a
    density underflows the log domain on one side.
    """
    ls = gmm_logpdf(x, suspect)
    lb = gmm_logpdf(x, background)
    if ls == -math.inf or lb == -math.inf:
        if ls == lb:
            # Both beyond the log-domain range: compare tail decay rates.
            ds = _min_standardized_distance(x, suspect)
            db = _min_standardized_distance(x, background)
            if ds == db:
                return 0.0
            return LOG_LR_CAP if ds < db else -LOG_LR_CAP
        return -LOG_LR_CAP if ls == -math.inf else LOG_LR_CAP
    return max(-LOG_LR_CAP, min(LOG_LR_CAP, ls - lb))


def score_from_points(data: OffenderData, suspect: Gmm, background: Gmm) -> float:
    """Score: mean over data points of the per-point natural-log LRs."""
    llrs = [gmm_lr(p, suspect, background) for p in data.points]
    return math.fsum(llrs) / len(llrs)


def bimodal_demo() -> tuple[Gmm, Gmm, float, float]:
    """Configuration where averaging raw data before computing an LR misleads.

    Returns (suspect, background, x1, x2) with x1 and x2 on the two peaks
    of a bimodal suspect model and the background concentrated between
    them, so that LR(x1) > 1 and LR(x2) > 1 while the LR at the midpoint
    of x1 and x2 is far below both.  Averaging the per-point log LRs keeps
    the evidence strong; averaging the raw points first destroys it.
    """
    suspect = Gmm([(0.5, -2.0, 0.6), (0.5, 2.0, 0.6)])
    background = Gmm([(0.75, 0.0, 1.1), (0.25, 0.0, 3.0)])
    return suspect, background, -2.0, 2.0
