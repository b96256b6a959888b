"""Exception hierarchy shared by the beamforming modules."""


class BeamformingError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BeamformingError, ValueError):
    """An argument is outside the domain of the operation."""


class ConditioningError(BeamformingError, ArithmeticError):
    """A matrix that must be positive definite is singular or indefinite."""


class DegeneracyError(BeamformingError, ArithmeticError):
    """An eigenvalue that must be simple is (numerically) repeated."""


class ConvergenceError(BeamformingError, RuntimeError):
    """An iterative solver hit its iteration cap.

    The best iterate found so far is kept on ``best`` so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConfigurationError(BeamformingError, ValueError):
    """A scenario or pipeline configuration is inconsistent."""


class FormatError(BeamformingError, ValueError):
    """A recorded snapshot file does not follow the BFSN layout."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DegenerateWeightError(BeamformingError, ArithmeticError):
    """A weight vector passes no interference-plus-noise power at all."""


class StageError(BeamformingError):
    """Wraps a failure inside the beamforming pipeline with the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
