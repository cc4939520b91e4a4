"""Exception hierarchy.

The CLI maps these onto exit codes: configuration problems exit 2, bad or
missing data exits 3, numerical degeneracy exits 4.
"""


class BlindRankError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(BlindRankError, ValueError):
    exit_code = 2


class DataError(BlindRankError, ValueError):
    exit_code = 3


class NumericalError(BlindRankError, ArithmeticError):
    exit_code = 4


class DisconnectedGraphError(NumericalError):
    """Perron-Frobenius uniqueness needs a connected graph."""


class DegenerateSpectrumError(NumericalError):
    """The leading eigenvalue is not simple (within tolerance)."""

    def __init__(self, message, lambda1=None, lambda2=None):
        super().__init__(message)
        self.lambda1 = lambda1
        self.lambda2 = lambda2


class ConvergenceError(NumericalError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class UndefinedBoundError(NumericalError):
    """Sampling bound requested for a pair of nodes with equal centrality."""
