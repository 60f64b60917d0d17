"""Synthetic score fixtures: analytic configurations and seeded samples.

Four canonical equal-variance Gaussian score configurations illustrate
what calibration does: fig4 is already calibrated (alpha 0, beta 1),
fig5 needs a unit shift, fig6 a halving of scale, fig7 both a doubling
and a unit shift.

Sampling uses a pinned counter-based generator (splitmix64 outputs fed
through Box-Muller), independent of numpy's RNG streams.  The integer
and uniform layers are bit-exact on every platform; the normal transform
is deterministic up to the rounding of the platform's log/cos/sin
(at most an ulp or two), and byte-for-byte stable on a fixed platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .gaussian_map import LabeledScores, ScoreGaussianModel, model_to_affine

FIGURE_IDS = ("fig4", "fig5", "fig6", "fig7")

_AFFINE_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class FigureConfig:
    """A named score-Gaussian configuration with its exact affine map."""

    figure_id: str
    model: ScoreGaussianModel
    expected_alpha: float
    expected_beta: float

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise DataError(f"unknown figure id {self.figure_id!r}")
        alpha, beta = model_to_affine(self.model)
        # sqrt-derived sigmas square back with one ulp of slack.
        if (
            abs(alpha - self.expected_alpha) > _AFFINE_MATCH_TOL
            or abs(beta - self.expected_beta) > _AFFINE_MATCH_TOL
        ):
            raise DataError(
                f"model affine map ({alpha}, {beta}) does not match expected "
                f"({self.expected_alpha}, {self.expected_beta})"
            )


_CONFIGS = {
    "fig4": ((0.5, -0.5, 1.0), 0.0, 1.0),
    "fig5": ((-0.5, -1.5, 1.0), 1.0, 1.0),
    "fig6": ((0.5, -0.5, math.sqrt(2.0)), 0.0, 0.5),
    "fig7": ((0.5, -1.5, 1.0), 1.0, 2.0),
}


def figure_config(figure_id: str) -> FigureConfig:
    """Look up one of the four canonical configurations by id."""
    key = str(figure_id).lower()
    if key not in _CONFIGS:
        raise DataError(
            f"unknown figure id {figure_id!r}; expected one of {', '.join(FIGURE_IDS)}"
        )
    (mu_so, mu_do, sigma), alpha, beta = _CONFIGS[key]
    return FigureConfig(
        figure_id=key,
        model=ScoreGaussianModel(mu_so=mu_so, mu_do=mu_do, sigma=sigma),
        expected_alpha=alpha,
        expected_beta=beta,
    )


# splitmix64 constants (Steele, Lea & Flood's SplittableRandom finalizer).
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_TO_UNIT = 2.0 ** -53


def _splitmix64(state: np.ndarray) -> np.ndarray:
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _uniform_open01(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms in (0, 1] from outputs ``start .. start+count-1`` of the stream."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    state = np.uint64(int(seed) % (1 << 64)) + idx * _GAMMA
    bits = _splitmix64(state)
    return ((bits >> np.uint64(11)) + np.uint64(1)) * _U64_TO_UNIT


def standard_normals(seed: int, count: int) -> np.ndarray:
    """Deterministic standard-normal draws via Box-Muller."""
    if count < 0:
        raise DataError(f"count must be non-negative, got {count}")
    n_pairs = (count + 1) // 2
    u1 = _uniform_open01(seed, 0, n_pairs)
    u2 = _uniform_open01(seed, n_pairs, n_pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * math.pi) * u2
    out = np.empty(2 * n_pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def sample_scores(
    model: ScoreGaussianModel, n_so: int, n_do: int, seed: int
) -> LabeledScores:
    """Draw seeded training scores from the two equal-variance Gaussians."""
    if n_so < 1 or n_do < 1:
        raise DataError(f"need at least one score per class, got {n_so} and {n_do}")
    z = standard_normals(seed, n_so + n_do)
    return LabeledScores(
        so=model.mu_so + model.sigma * z[:n_so],
        do=model.mu_do + model.sigma * z[n_so:],
    )
