"""Exception hierarchy.

Every numeric failure derives from :class:`NumericError` so the command
line front end can map it to a single exit status.
"""


class SimquadError(Exception):
    """Base class for all package errors."""


class DomainError(SimquadError, ValueError):
    """A parameter or argument lies outside the admissible domain."""


class IncompleteInputError(SimquadError, KeyError):
    """A coefficient or grid value needed by a computation is missing."""

    def __str__(self):
        # KeyError would otherwise repr() the message
        return str(self.args[0]) if self.args else ""


class UnsupportedOracleError(SimquadError):
    """The weight system has no moment oracle for the requested measure."""


class NumericError(SimquadError, ArithmeticError):
    """Base class for failures of the numerical algorithms."""


class RealityError(NumericError):
    """An eigenvalue could not be resolved to a real number."""


class MultiplicityError(NumericError):
    """Two polished eigenvalues coincide to working precision."""


class ResidualError(NumericError):
    """An eigenvector residual exceeds its certificate bound."""


class InnerProductCollapseError(NumericError):
    """The left/right eigenvector inner product vanished."""


class SingularityError(NumericError):
    """A linear system is singular (coincident nodes)."""


class IntegrandError(NumericError):
    """The integrand could not be evaluated at a quadrature node."""
