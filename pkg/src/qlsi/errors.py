"""Exception hierarchy. Every failure mode raises a subclass of QlsiError."""


class QlsiError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(QlsiError):
    """Operands have incompatible shapes or an invalid dimension."""


class ParameterError(QlsiError):
    """A scalar parameter is outside its supported range."""


class DomainError(QlsiError):
    """A matrix function was evaluated outside its domain (e.g. log of a
    clipped-zero eigenvalue, negative power of a singular operator)."""


class ContractViolationError(QlsiError):
    """An input violates a documented precondition that is checked at runtime
    (e.g. a generator that is not reversible where reversibility is required)."""


class ResourceLimitError(QlsiError):
    """The requested computation exceeds the supported dense-matrix scale."""


class DecompositionError(QlsiError):
    """A matrix decomposition failed to converge."""


class EstimationError(QlsiError):
    """An optimization-based estimate could not produce any valid candidate."""
