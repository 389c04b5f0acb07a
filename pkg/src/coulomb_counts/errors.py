"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ConvergenceError(ArithmeticError):
    """A series, continued fraction or iteration did not converge."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature hit its refinement cap.

    ``index`` is the moment index ``j`` being integrated, when known.
    """

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (index j={index})"
        super().__init__(message)
        self.index = index


class InverseCDFError(ArithmeticError):
    """Numeric inversion of a radial CDF failed for a custom potential."""
