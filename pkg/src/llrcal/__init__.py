"""Score-to-likelihood-ratio calibration, fusion, and evaluation."""

from .errors import (
    ConvergenceError,
    DataError,
    IllConditionedError,
    LlrcalError,
    SeparationError,
    TrainingError,
)
from .score_engine import (
    LOG_LR_CAP,
    GaussianParams,
    Gmm,
    OffenderData,
    bimodal_demo,
    fit_gaussian,
    gaussian_lr,
    gmm_lr,
    gmm_pdf,
    score_from_points,
)
from .gaussian_map import (
    LabeledScores,
    ScoreGaussianModel,
    inverse_logit,
    logit,
    model_to_affine,
    posterior_prob,
    score_llr,
    train_score_gaussians,
)
from .logreg import (
    CalibrationWeights,
    ParallelScores,
    TrainConfig,
    apply,
    objective,
    train_calibration,
    train_fusion,
)
from .evaluation import (
    LlrSet,
    PairedScoreDb,
    TippettCurve,
    cllr,
    crossval_calibrate,
    tippett_curve,
)
from .synthdata import FigureConfig, figure_config, sample_scores, standard_normals

__version__ = "0.1.0"

__all__ = [
    "LOG_LR_CAP",
    "CalibrationWeights",
    "ConvergenceError",
    "DataError",
    "FigureConfig",
    "GaussianParams",
    "Gmm",
    "IllConditionedError",
    "LabeledScores",
    "LlrSet",
    "LlrcalError",
    "OffenderData",
    "PairedScoreDb",
    "ParallelScores",
    "ScoreGaussianModel",
    "SeparationError",
    "TippettCurve",
    "TrainConfig",
    "TrainingError",
    "apply",
    "bimodal_demo",
    "cllr",
    "crossval_calibrate",
    "figure_config",
    "fit_gaussian",
    "gaussian_lr",
    "gmm_lr",
    "gmm_pdf",
    "inverse_logit",
    "logit",
    "model_to_affine",
    "objective",
    "posterior_prob",
    "sample_scores",
    "score_from_points",
    "score_llr",
    "standard_normals",
    "tippett_curve",
    "train_calibration",
    "train_fusion",
    "train_score_gaussians",
    "__version__",
]
