"""Exception hierarchy shared by all fck modules."""


class FckError(Exception):
    """Base class for all errors raised by this package."""


class BackendError(FckError):
    """Scalar backends were mixed, or a value does not belong to a backend."""


class DimensionError(FckError):
    """Mismatched ground-set sizes, series orders, or sequence lengths."""


class SizeLimitError(FckError):
    """A combinatorial size cap was exceeded; the message names the limit."""


class SeriesDivisionError(FckError):
    """Series division by a divisor with vanishing constant term."""


class CompositionDomainError(FckError):
    """Series composition with an inner series of nonzero constant term."""


class ReversionDomainError(FckError):
    """Series reversion of a series without a simple zero at the origin."""


class DomainError(FckError):
    """Inadmissible parameters; the message quotes the violated constraint."""


class CapabilityError(FckError):
    """Missing data (support bound, density, tail value) for the request."""


class DivergenceError(FckError):
    """A certified tail bound cannot be brought below the requested tolerance."""


class IncompleteTableError(FckError):
    """A cumulant table lacks an entry; the message names the missing block."""


class OracleError(FckError):
    """A moment oracle failed; carries the offending sub-word."""

    def __init__(self, message, word=None):
        super().__init__(message)
        self.word = word


class VerificationError(FckError):
    """Two independently computed sides of an identity disagree."""
