"""Exception and warning classes raised by qcalc."""


class QCalcError(Exception):
    """Base class for all qcalc errors."""


class DomainError(QCalcError, ValueError):
    """An argument lies outside the domain of the operation."""


class ModeError(QCalcError, ValueError):
    """The requested arithmetic mode cannot represent the input."""


class PoleError(QCalcError, ZeroDivisionError):
    """A denominator factor vanishes (or is numerically indistinguishable from 0)."""


class NotInvertible(QCalcError, ZeroDivisionError):
    """A truncated series with zero lowest coefficient was inverted."""


class SeriesWindowError(QCalcError, ValueError):
    """The bilateral window needed for an exact series cannot be bounded."""


class DivergenceWarning(RuntimeWarning):
    """Terms of a sum failed to decay within the truncation window."""


class InexactWarning(UserWarning):
    """Exact mode had to fall back to a floating non-integer power of q."""
