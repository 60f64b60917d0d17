"""Equal-prior binomial logistic regression for calibration and fusion.

The trained model is an affine map from an n-vector of scores to a
natural-log likelihood ratio: ln LR = alpha + beta_1 s_1 + ... + beta_n s_n.
n = 1 is calibration, n > 1 is fusion of parallel score sets; correlation
between fused systems is absorbed by the joint fit, no decorrelation
preprocessing is done.

The objective weights each class by 1/(2 N_class), which realizes equal
priors regardless of class imbalance, and optionally adds a ridge penalty
on the slopes only (never the intercept, which would bias LLRs toward 0).
Training is deterministic: damped Newton iteration from all-zero weights,
stopping when the gradient max-norm falls below the configured tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DataError,
    IllConditionedError,
    SeparationError,
)
from .gaussian_map import LabeledScores

_SEPARATION_HINT = (
    "complete or near-complete separation between the same-origin training "
    "scores and the different-origin training scores is the likely cause; "
    "retry with a ridge penalty (e.g. ridge_lambda=0.001)"
)


@dataclass(frozen=True)
class TrainConfig:
    """Training knobs: ridge weight, stopping tolerance, iteration cap.

    Equal priors p(H_so) = p(H_do) = 0.5 are built into the objective and
    are deliberately not configurable.
    """

    ridge_lambda: float = 0.0
    grad_tolerance: float = 1e-8
    max_iterations: int = 10000

    def __post_init__(self):
        if not (math.isfinite(self.ridge_lambda) and self.ridge_lambda >= 0.0):
            raise DataError(f"ridge_lambda must be >= 0, got {self.ridge_lambda}")
        if not (math.isfinite(self.grad_tolerance) and self.grad_tolerance > 0.0):
            raise DataError(f"grad_tolerance must be > 0, got {self.grad_tolerance}")
        if self.max_iterations < 1:
            raise DataError(f"max_iterations must be positive, got {self.max_iterations}")


DEFAULT_CONFIG = TrainConfig()


@dataclass(frozen=True)
class CalibrationWeights:
    """Intercept and per-system slopes, with training provenance.

    LLR units are natural log.  ``n_so``/``n_do`` record the training set
    size and ``ridge_lambda`` the penalty used; they are zero for weights
    constructed by hand.
    """

    alpha: float
    betas: tuple[float, ...]
    n_so: int = 0
    n_do: int = 0
    ridge_lambda: float = 0.0

    def __init__(self, alpha, betas, n_so=0, n_do=0, ridge_lambda=0.0):
        betas = tuple(float(b) for b in betas)
        if not betas:
            raise DataError("weights need at least one slope")
        if not math.isfinite(float(alpha)) or not all(math.isfinite(b) for b in betas):
            raise DataError("weights must be finite")
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "n_so", int(n_so))
        object.__setattr__(self, "n_do", int(n_do))
        object.__setattr__(self, "ridge_lambda", float(ridge_lambda))

    @property
    def n_systems(self) -> int:
        return len(self.betas)

    def to_json(self) -> str:
        """Serialize to the fixed cross-tool JSON schema."""
        doc = {
            "alpha": self.alpha,
            "betas": list(self.betas),
            "log_base": "e",
            "trained_on": {"n_so": self.n_so, "n_do": self.n_do},
            "ridge_lambda": self.ridge_lambda,
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CalibrationWeights":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid model JSON: {exc}") from exc
        try:
            if doc["log_base"] != "e":
                raise DataError(
                    f"unsupported log_base {doc['log_base']!r}, expected 'e'"
                )
            return cls(
                alpha=doc["alpha"],
                betas=doc["betas"],
                n_so=doc["trained_on"]["n_so"],
                n_do=doc["trained_on"]["n_do"],
                ridge_lambda=doc["ridge_lambda"],
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"model JSON missing or malformed field: {exc}") from exc


def _rows_to_matrix(rows, what: str) -> np.ndarray | None:
    if isinstance(rows, np.ndarray):
        if rows.size == 0:
            return None
        if rows.ndim != 2:
            raise DataError(f"{what} array must be 2-D (rows of per-system scores)")
        arr = rows.astype(float, copy=True)
    else:
        try:
            rows = [tuple(float(v) for v in row) for row in rows]
        except TypeError:
            raise DataError(
                f"each {what} row must be a sequence of per-system scores"
            ) from None
        if not rows:
            return None
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DataError(f"{what} rows have inconsistent dimensions")
        arr = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{what} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class ParallelScores:
    """Parallel per-system score vectors for both comparison classes.

    Every row holds one score per system for a single comparison; all rows
    across both classes share the same dimension.
    """

    so: np.ndarray
    do: np.ndarray

    def __init__(self, so, do):
        m_so = _rows_to_matrix(so, "same-origin scores")
        m_do = _rows_to_matrix(do, "different-origin scores")
        if m_so is None and m_do is None:
            raise DataError("cannot determine score dimension: both classes empty")
        n = m_so.shape[1] if m_so is not None else m_do.shape[1]
        if n < 1:
            raise DataError("score rows must have at least one column")
        if m_so is None:
            m_so = np.empty((0, n))
        if m_do is None:
            m_do = np.empty((0, n))
        if m_so.shape[1] != m_do.shape[1]:
            raise DataError(
                f"class dimensions differ: {m_so.shape[1]} vs {m_do.shape[1]}"
            )
        m_so.setflags(write=False)
        m_do.setflags(write=False)
        object.__setattr__(self, "so", m_so)
        object.__setattr__(self, "do", m_do)

    @property
    def n_systems(self) -> int:
        return self.so.shape[1]

    @classmethod
    def from_labeled(cls, scores: LabeledScores) -> "ParallelScores":
        return cls(scores.so.reshape(-1, 1), scores.do.reshape(-1, 1))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def objective(
    weights: CalibrationWeights,
    data: ParallelScores,
    config: TrainConfig = DEFAULT_CONFIG,
) -> float:
    """Equal-prior cross-entropy (nats) plus the ridge penalty.

    J = mean_so softplus(-z)/2 + mean_do softplus(z)/2
        + ridge_lambda/2 * sum(betas^2),   z = alpha + betas . s

    Without the penalty this is Cllr in nats: dividing by ln 2 gives the
    log-likelihood-ratio cost of the mapped training scores.
    """
    if weights.n_systems != data.n_systems:
        raise DataError(
            f"weights have {weights.n_systems} slopes but data has "
            f"{data.n_systems} systems"
        )
    if data.so.shape[0] == 0 or data.do.shape[0] == 0:
        raise DataError("objective needs at least one score in each class")
    b = np.asarray(weights.betas)
    z_so = weights.alpha + data.so @ b
    z_do = weights.alpha + data.do @ b
    j = 0.5 * float(np.mean(np.logaddexp(0.0, -z_so)))
    j += 0.5 * float(np.mean(np.logaddexp(0.0, z_do)))
    j += 0.5 * config.ridge_lambda * float(np.sum(b * b))
    return j


def _train(data: ParallelScores, config: TrainConfig) -> CalibrationWeights:
    n_so, n = data.so.shape
    n_do = data.do.shape[0]
    if n_so == 0 or n_do == 0:
        raise DataError(
            f"training needs both classes non-empty, got {n_so} same-origin "
            f"and {n_do} different-origin rows"
        )
    x_so = np.hstack([np.ones((n_so, 1)), data.so])
    x_do = np.hstack([np.ones((n_do, 1)), data.do])
    lam = config.ridge_lambda
    penalty = np.zeros(n + 1)
    penalty[1:] = lam

    def value(w):
        j = 0.5 * float(np.mean(np.logaddexp(0.0, -(x_so @ w))))
        j += 0.5 * float(np.mean(np.logaddexp(0.0, x_do @ w)))
        return j + 0.5 * lam * float(np.sum(w[1:] * w[1:]))

    w = np.zeros(n + 1)
    j = value(w)
    norms = [0.0]
    for iteration in range(config.max_iterations):
        z_so = x_so @ w
        z_do = x_do @ w
        u_so = _sigmoid(-z_so)
        u_do = _sigmoid(z_do)
        grad = (
            -(x_so.T @ u_so) / (2.0 * n_so)
            + (x_do.T @ u_do) / (2.0 * n_do)
            + penalty * w
        )
        if float(np.max(np.abs(grad))) < config.grad_tolerance:
            if (
                lam == 0.0
                and np.any(w[1:] != 0.0)
                and z_so.min() >= 0.0
                and z_do.max() <= 0.0
            ):
                # The fitted map puts every same-origin comparison at or
                # above the boundary and every different-origin one at or
                # below it: the classes are (quasi-)separated, the
                # unpenalized optimum is at infinity, and this stationary
                # point is spurious.
                raise SeparationError(
                    f"no finite optimum: {_SEPARATION_HINT}"
                )
            return CalibrationWeights(
                alpha=w[0],
                betas=w[1:],
                n_so=n_so,
                n_do=n_do,
                ridge_lambda=lam,
            )
        w_so = u_so * (1.0 - u_so)
        w_do = u_do * (1.0 - u_do)
        hess = (
            (x_so * w_so[:, None]).T @ x_so / (2.0 * n_so)
            + (x_do * w_do[:, None]).T @ x_do / (2.0 * n_do)
            + np.diag(penalty)
        )
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = None
        if step is None or not np.all(np.isfinite(step)):
            if iteration == 0:
                raise IllConditionedError(
                    "singular design: training score columns are collinear "
                    "(add a ridge penalty or drop redundant systems)"
                )
            if lam == 0.0:
                raise SeparationError(
                    f"curvature collapsed while weights diverged: {_SEPARATION_HINT}"
                )
            raise ConvergenceError("Newton system became singular")
        # Armijo backtracking keeps full Newton steps whenever they help.
        slope = float(grad @ step)
        t = 1.0
        while True:
            j_new = value(w + t * step)
            if j_new <= j + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-20:
                raise ConvergenceError(
                    "line search stalled before reaching the gradient tolerance"
                )
        w = w + t * step
        j = j_new
        norms.append(float(np.linalg.norm(w)))

    tail = norms[-min(len(norms), 50):]
    growing = all(b > a for a, b in zip(tail, tail[1:]))
    if lam == 0.0 and growing:
        raise SeparationError(
            f"no convergence after {config.max_iterations} iterations with "
            f"monotonically growing weights: {_SEPARATION_HINT}"
        )
    raise ConvergenceError(
        f"gradient tolerance {config.grad_tolerance} not reached within "
        f"{config.max_iterations} iterations"
    )


def train_calibration(
    scores: LabeledScores, config: TrainConfig = DEFAULT_CONFIG
) -> CalibrationWeights:
    """Fit (alpha, beta) mapping univariate scores to natural-log LRs.

    The objective is convex; on separable training sets with no ridge
    penalty there is no finite optimum and SeparationError is raised.
    """
    return train_fusion(ParallelScores.from_labeled(scores), config)


def train_fusion(
    scores: ParallelScores, config: TrainConfig = DEFAULT_CONFIG
) -> CalibrationWeights:
    """Fit fusion weights over n parallel score sets.

    With n = 1 this is identical to train_calibration.
    """
    return _train(scores, config)


def apply(weights: CalibrationWeights, score_vector: Sequence[float]) -> float:
    """Evaluate ln LR = alpha + betas . score_vector."""
    vec = np.asarray(score_vector, dtype=float).reshape(-1)
    if vec.size != weights.n_systems:
        raise DataError(
            f"score vector has dimension {vec.size}, weights expect "
            f"{weights.n_systems}"
        )
    return float(weights.alpha + vec @ np.asarray(weights.betas))
