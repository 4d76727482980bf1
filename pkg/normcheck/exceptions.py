"""Errors raised by normcheck."""


class NormcheckError(Exception):
    """Base class of all normcheck errors."""


class NonSquareError(NormcheckError, ValueError):
    """A square matrix was required."""


class DimensionMismatchError(NormcheckError, ValueError):
    """Operands have incompatible sizes."""


class OnSpectrumError(NormcheckError, ValueError):
    """The evaluation point lies on the spectrum (to working precision)."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


class RejectedSampleError(OnSpectrumError):
    """A sample point handed to a criterion lies on the spectrum."""


class SingularBlockError(NormcheckError, ValueError):
    """A diagonal block of a block-triangular matrix is singular."""


class SchurConvergenceError(NormcheckError, ArithmeticError):
    """The QR iteration behind the Schur form did not converge."""


class IllPosedInterpolationError(NormcheckError, ValueError):
    """Interpolation of the resolvent is requested too close to the spectrum."""


class ContourError(NormcheckError, ValueError):
    """A quadrature contour does not enclose the spectrum or has too few nodes."""


class HypothesisViolationError(NormcheckError, ValueError):
    """A decision needs a hypothesis that does not hold, such as a normal A."""


class MatrixFileError(NormcheckError, ValueError):
    """A matrix file could not be parsed."""
