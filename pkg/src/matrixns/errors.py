"""Exception types shared across the package.

Every error raised by library code derives from :class:`MatrixnsError` so
callers (and the CLI) can distinguish library failures from programming
errors. The CLI maps subclasses onto exit codes; see ``matrixns.cli``.
"""


class MatrixnsError(Exception):
    """Base class for all library errors."""


class InvalidDimension(MatrixnsError):
    """A dimension argument violates a generator's requirements."""


class NotPositiveDefinite(MatrixnsError):
    """A matrix required to be SPD failed its Cholesky factorization."""


class NonConvergence(MatrixnsError):
    """An iterative routine exhausted its budget without converging."""


class NonFiniteEncountered(MatrixnsError):
    """A NaN or infinity appeared where finite values are required."""


class ZeroVariance(MatrixnsError):
    """A variable position has (numerically) zero empirical variance."""


class ZeroDiagonal(MatrixnsError):
    """A Gram matrix has a non-positive diagonal entry."""


class InsufficientSamples(MatrixnsError):
    """Too few observations for the requested operation."""


class SingularInput(MatrixnsError):
    """An input matrix is singular where invertibility is required."""


class DimensionMismatch(MatrixnsError):
    """Two objects that must share a dimension do not."""


class ShapeMismatch(MatrixnsError):
    """Files in a dataset directory disagree on their matrix shape."""


class EmptyGraph(MatrixnsError):
    """An operation is undefined on a graph with no edges (d_max = 0)."""


class TargetUnreachable(MatrixnsError):
    """Connectivity calibration could not get within tolerance of the target."""
