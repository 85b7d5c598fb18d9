class CCRMError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(CCRMError, ValueError):
    pass


class InvalidSetError(CCRMError, ValueError):
    """A set descriptor violates its invariants (non-SPD matrix, empty box, ...)."""


class ProjectionError(CCRMError, RuntimeError):
    """An iterative projection failed to converge.

    ``residual`` holds the constraint value reached when the solver gave up.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DegenerateCircumcenterError(CCRMError, ArithmeticError):
    """Three distinct collinear points have no equidistant point in their hull."""


class ConfigurationError(CCRMError, ValueError):
    pass


class GenerationError(CCRMError, RuntimeError):
    pass


class SolverError(CCRMError, RuntimeError):
    """A solve aborted; ``trace`` holds everything recorded up to the failure."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
