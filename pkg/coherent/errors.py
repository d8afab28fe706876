# errors.py
# Exception hierarchy. Each class carries the CLI exit status for its outcome.
# Author: The Coherent Pairs Team


class CoherentError(Exception):
    """Base class for every failure raised by the library."""

    exit_code = 1


class BackendMismatchError(CoherentError):
    """Operands live on different scalar backends, or a value cannot be coerced."""


class PreconditionError(CoherentError):
    """An operation was called outside its documented domain."""


class CacheDepthError(CoherentError):
    """A polynomial, norm or band row beyond the computed depth was requested."""


class RegularityError(CoherentError):
    """A functional is not regular: some h_n (or Hankel determinant) vanishes."""

    exit_code = 2

    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(message or f"regularity breaks down at n={index}")


class CoherenceViolation(CoherentError):
    exit_code = 3


class BudgetError(CoherentError):
    """More moments were requested than the functional carries."""

    exit_code = 4


class HypothesisFailure(CoherentError):
    """A theorem hypothesis (non-vanishing determinant) does not hold."""

    exit_code = 5


class ParameterGateError(CoherentError):
    """Structure-relation inputs fail a positivity or integrability gate."""

    exit_code = 6


class ConfigError(CoherentError):
    exit_code = 6


class ResidualError(CoherentError):
    """A verified identity left a residual above tolerance."""

    exit_code = 7


class QuadratureError(CoherentError):
    exit_code = 7
