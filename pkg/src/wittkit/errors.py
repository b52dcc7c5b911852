"""Failure modes that callers are expected to catch and report."""


class WittkitError(Exception):
    """Base class for all package errors."""


class UsageError(WittkitError):
    """Malformed input or an unsupported parameter combination."""


class InsufficientBoundError(WittkitError):
    """An enumeration bound was too small to close a computation.

    Carries enough context to suggest a retry; never a silent wrong answer.
    """


class BoundExhaustedError(InsufficientBoundError):
    """A truncated vector ran out of components mid-computation."""


class PrecisionError(WittkitError):
    """Working precision cannot certify the requested comparison."""


class NoRelationError(WittkitError):
    """Integer-relation search found no polynomial within the degree cap."""


class CertificationError(WittkitError):
    """An exactness certificate (rounding, divisibility, labeling) failed."""
