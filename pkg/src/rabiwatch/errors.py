"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Non-finite, out-of-range or structurally malformed input."""


class DegenerateStateError(ValueError):
    """A zero-norm amplitude pair, i.e. an impossible measurement branch."""


class NoInformationError(ValueError):
    """The measurement cannot discriminate the two modes (p1 == p2)."""


class UndefinedCorrelationError(ValueError):
    """Pearson correlation requested for a constant series."""


class NoPeakError(ValueError):
    """Spectrum carries no power at any nonzero frequency."""


class EnumerationBoundError(ValueError):
    """Exact outcome enumeration requested beyond the supported length."""


class InvariantViolation(RuntimeError):
    """A simulation result broke one of its documented invariants."""
