"""Pooled-variance Gaussian score-to-LR conversion.

Two single Gaussians with a shared (pooled within-group) variance are
fitted to same-origin and different-origin training scores.  The log of
their density ratio at a test score is then an exact affine function of
the score, which is also the analytic optimum that logistic-regression
calibration estimates.  The shared variance guarantees the log LR crosses
zero exactly once: higher scores always support same-origin more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError


def _as_finite_1d(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size and not np.all(np.isfinite(arr)):
        raise DataError(f"{what} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LabeledScores:
    """Same-origin and different-origin score collections.

    Either class may be empty at construction; training operations check
    the counts they need.
    """

    so: np.ndarray
    do: np.ndarray

    def __init__(self, so: Sequence[float], do: Sequence[float]):
        object.__setattr__(self, "so", _as_finite_1d(so, "same-origin scores"))
        object.__setattr__(self, "do", _as_finite_1d(do, "different-origin scores"))


@dataclass(frozen=True)
class ScoreGaussianModel:
    """Equal-variance Gaussian score models for the two hypotheses.

    mu_so must exceed mu_do: a higher score must, on average, support the
    same-origin hypothesis.  A training set violating that is pathological
    and rejected rather than silently producing a decreasing score-to-LR map.
    """

    mu_so: float
    mu_do: float
    sigma: float

    def __post_init__(self):
        for v in (self.mu_so, self.mu_do, self.sigma):
            if not math.isfinite(v):
                raise DataError("score model parameters must be finite")
        if self.sigma <= 0.0:
            raise DataError(f"sigma must be strictly positive, got {self.sigma}")
        if not self.mu_so > self.mu_do:
            raise DataError(
                "pathological training set: same-origin score mean "
                f"({self.mu_so}) does not exceed different-origin mean ({self.mu_do})"
            )


def train_score_gaussians(scores: LabeledScores) -> ScoreGaussianModel:
    """Fit class means and the pooled within-group standard deviation.

    The pooled variance uses the standard (N_so + N_do - 2) denominator.
    """
    n_so, n_do = scores.so.size, scores.do.size
    if n_so < 2 or n_do < 2:
        raise DataError(
            f"need at least 2 scores per class, got {n_so} same-origin "
            f"and {n_do} different-origin"
        )
    mu_so = float(np.mean(scores.so))
    mu_do = float(np.mean(scores.do))
    ss = float(np.sum((scores.so - mu_so) ** 2) + np.sum((scores.do - mu_do) ** 2))
    if ss == 0.0:
        raise DataError("degenerate training scores: pooled variance is zero")
    sigma = math.sqrt(ss / (n_so + n_do - 2))
    return ScoreGaussianModel(mu_so=mu_so, mu_do=mu_do, sigma=sigma)


def model_to_affine(model: ScoreGaussianModel) -> tuple[float, float]:
    """Exact (alpha, beta) such that ln LR(s) = alpha + beta * s for all s.

    Expanding the log ratio of the two equal-variance Gaussian densities
    gives beta = (mu_so - mu_do) / sigma^2 and
    alpha = (mu_do^2 - mu_so^2) / (2 sigma^2), in natural-log units.
    """
    var = model.sigma * model.sigma
    beta = (model.mu_so - model.mu_do) / var
    alpha = (model.mu_do * model.mu_do - model.mu_so * model.mu_so) / (2.0 * var)
    return alpha, beta


def score_llr(s: float, model: ScoreGaussianModel) -> float:
    """Natural-log LR of a score under the fitted equal-variance Gaussians.

    Evaluated through the affine form, which is exact and immune to pdf
    underflow at extreme scores.
    """
    s = float(s)
    if not math.isfinite(s):
        raise DataError(f"score must be finite, got {s}")
    alpha, beta = model_to_affine(model)
    return alpha + beta * s


def posterior_prob(s: float, model: ScoreGaussianModel) -> float:
    """Equal-prior posterior probability of same origin given a score.

    Equals f(s|H_so) / (f(s|H_so) + f(s|H_do)); computed as the logistic
    sigmoid of the affine log LR for numerical stability.
    """
    return inverse_logit(score_llr(s, model))


def logit(p: float) -> float:
    """Log odds ln(p / (1 - p)); p must lie strictly inside (0, 1)."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DataError(f"probability must be in the open interval (0, 1), got {p}")
    return math.log(p / (1.0 - p))


def inverse_logit(z: float) -> float:
    """Logistic sigmoid, stable for large |z|."""
    z = float(z)
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)
