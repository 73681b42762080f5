"""Exception hierarchy shared by all modules."""


class NHBlochError(Exception):
    """Base class for every error raised by this package."""


class SizeError(NHBlochError, ValueError):
    """Chain is too short for the requested operation."""

    def __init__(self, n_cells, minimum, what="open chain"):
        self.n_cells = n_cells
        self.minimum = minimum
        super().__init__(f"{what} needs at least N={minimum} cells, got N={n_cells}")


class DegenerateCoefficientError(NHBlochError, ValueError):
    """Leading coefficient omega_0 of the characteristic polynomial vanishes.

    This usually means the parameters sit on an exceptional-point variety;
    see :func:`nhbloch.analysis.ep_classify_ssh` and ``ep_classify_ladder``.
    """


class SingularAlphaError(NHBlochError, ValueError):
    """The closed-form energy is singular at alpha = 0."""


class ConvergenceError(NHBlochError, RuntimeError):
    """A dense eigensolver did not converge."""


class InsufficientDataError(NHBlochError, ValueError):
    """Not enough usable cells for a localization fit."""


class NotAnEigenvalueError(NHBlochError, ValueError):
    """The probe value is not an eigenvalue of the matrix."""


class DegenerateModelError(NHBlochError, ValueError):
    """The model has no hoppings at all, or a closed form is undefined."""


class TemplateVerificationError(NHBlochError, RuntimeError):
    """A closed-form exceptional-point eigenvector failed its residual check."""

    def __init__(self, message, residuals=None):
        self.residuals = residuals or {}
        super().__init__(message)


class ConfigError(NHBlochError, ValueError):
    """Invalid run configuration."""
