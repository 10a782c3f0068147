"""Custom exception hierarchy for qslkit.

Provides specific exception types for the numerical and input failures
the library can hit, so callers (and the CLI exit-code mapping) can tell
them apart.
"""


class QslKitError(Exception):
    """Base exception for all qslkit errors."""

    pass


class DimensionError(QslKitError):
    """Raised when operator dimensions do not agree or are not allowed."""

    pass


class NumericalError(QslKitError):
    """Raised when an eigensolver or decomposition fails to converge."""

    pass


class RangeError(QslKitError):
    """Raised when an integer argument (qubit count, dimension) is out of range."""

    pass


class TraceError(QslKitError):
    """Raised when an operator that must be traceless is not."""

    pass


class HermiticityError(QslKitError):
    """Raised when a matrix is not Hermitian within tolerance."""

    pass


class UnitarityError(QslKitError):
    """Raised when a matrix is not unitary within tolerance."""

    pass


class NormError(QslKitError):
    """Raised when an observable must be unit-norm and is not."""

    pass


class DegenerateGateError(QslKitError):
    """Raised when a gate is the identity up to phase and needs no generator."""

    pass


class DegenerateError(QslKitError):
    """Raised for degenerate geometric input (zero Hamiltonian, all-zero coefficients)."""

    pass


class NotFoundError(QslKitError):
    """Raised when a named gate or frame is not in the registry."""

    pass


class ConfigError(QslKitError):
    """Raised when configuration or command input is invalid."""

    pass


class PersistenceError(QslKitError):
    """Raised when JSON/CSV file I/O operations fail."""

    pass
