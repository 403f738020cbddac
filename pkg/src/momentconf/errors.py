"""Exception types raised across the package."""


class MomentConfError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(MomentConfError, ValueError):
    pass


class DecompositionFailure(MomentConfError, RuntimeError):
    pass


class DimensionError(MomentConfError, ValueError):
    pass


class SingularMatrix(MomentConfError, ValueError):
    pass


class InvalidSpectrum(MomentConfError, ValueError):
    pass


class UnboundedMoments(MomentConfError, ValueError):
    pass


class InsufficientData(MomentConfError, ValueError):
    pass


class IllConditioned(MomentConfError, ValueError):
    """Raised when a covariance has no positive eigenvalue at all."""


class DegenerateColumn(MomentConfError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} has zero variance")


class InvalidGrid(MomentConfError, ValueError):
    pass


class EmptyInput(MomentConfError, ValueError):
    pass


class ParseError(MomentConfError, ValueError):
    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
