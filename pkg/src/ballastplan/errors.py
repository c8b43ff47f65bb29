"""Exception types shared across the package."""


class BallastPlanError(Exception):
    """Base class for all package errors."""


class DomainError(BallastPlanError):
    """An argument violates an operation's domain (bad range, bad shape)."""


class SizeError(DomainError):
    """A problem instance exceeds a hard size limit."""


class CalibrationError(BallastPlanError):
    """A calibration target cannot be met or is degenerate."""


class SolverError(BallastPlanError):
    """The allocation solver failed to converge.

    Carries the best iterate found so callers can inspect it.
    """

    def __init__(self, message, best_allocation=None):
        super().__init__(message)
        self.best_allocation = best_allocation


class ConfigError(BallastPlanError):
    """A scenario/model/config file is missing or malformed."""
