"""Exception hierarchy. The CLI maps these onto exit codes."""


class SmolinError(Exception):
    """Base class for all package errors."""


class ValidationError(SmolinError, ValueError):
    """Bad input: out-of-range parameter, malformed file, wrong dimension."""


class InfeasibleSourceError(ValidationError):
    """Requested (fidelity, tangle) pair cannot be reached by the source family."""


class NumericalError(SmolinError, ArithmeticError):
    """The numerics cannot proceed on otherwise well-formed input."""


class NotInformationallyCompleteError(NumericalError):
    """Measurement projectors do not span the operator space."""


class NullProjectionError(NumericalError):
    """Projection onto an outcome with (numerically) zero probability."""
