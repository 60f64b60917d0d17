"""Exception hierarchy shared across the package.

Two branches matter to callers: ``DataError`` for invalid or degenerate
inputs, and ``TrainingError`` for numerical failures during optimization.
The CLI maps them to exit codes 2 and 3 respectively.
"""


class LlrcalError(Exception):
    """Base class for all errors raised by this package."""


class DataError(LlrcalError, ValueError):
    """Invalid, degenerate, or dimensionally inconsistent input data."""


class TrainingError(LlrcalError, RuntimeError):
    """Numerical failure while fitting calibration or fusion weights."""


class SeparationError(TrainingError):
    """Training classes are completely or quasi-completely separated.

    Unregularized logistic regression has no finite optimum on separated
    data; retry with a ridge penalty (e.g. 0.001).
    """


class IllConditionedError(TrainingError):
    """Design matrix is rank deficient (e.g. exactly collinear columns)."""


class ConvergenceError(TrainingError):
    """Optimizer failed to reach the gradient tolerance."""
