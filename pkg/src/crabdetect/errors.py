"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CrabDetectError(Exception):
    exit_code = 1


class ValidationError(CrabDetectError, ValueError):
    """Bad configuration, bad file content or a violated precondition."""

    exit_code = 2


class InsufficientDataError(ValidationError):
    pass


class NumericalError(CrabDetectError, ArithmeticError):
    exit_code = 3


class DegenerateCovarianceError(NumericalError):
    """Covariance could not be factorised even after diagonal loading."""


class InvalidCovarianceError(NumericalError):
    """Covariance is not positive semidefinite."""


class DegenerateContourError(NumericalError):
    """Contour too short (or perimeter zero) for a shape feature."""
