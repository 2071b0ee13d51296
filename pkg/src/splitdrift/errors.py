"""Exception types shared across the package."""


class SplitDriftError(Exception):
    """Base class for all errors raised by this package."""


class HermiticityError(SplitDriftError, ValueError):
    """Matrix is too far from Hermitian to be accepted as an observable."""


class UnitarityError(SplitDriftError, ValueError):
    """Matrix fails the unitarity defect bound."""


class DimensionMismatchError(SplitDriftError, ValueError):
    """Operands live on Hilbert spaces of different dimensions."""


class EigendecompositionError(SplitDriftError, RuntimeError):
    """LAPACK failed to converge while diagonalizing."""


class BranchCutError(SplitDriftError, ValueError):
    """An eigenvalue phase of a unitary sits too close to ±π for a
    principal logarithm; evaluate at a smaller time step."""


class UnsupportedOrderError(SplitDriftError, ValueError):
    """Requested expansion order is outside the implemented range."""


class InsufficientDataError(SplitDriftError, ValueError):
    """Too few usable data points above the roundoff floor to fit."""


class NumericalError(SplitDriftError, RuntimeError):
    """A simulation produced non-finite or internally inconsistent values."""


class ConfigError(SplitDriftError, ValueError):
    """Experiment configuration failed strict validation."""
