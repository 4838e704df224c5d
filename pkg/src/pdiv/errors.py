"""Exception hierarchy shared by all modules."""


class PdivError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(PdivError):
    """Parameters outside the supported range."""


class NonUnitError(PdivError, ZeroDivisionError):
    """Inverse requested for a non-unit."""


class DivisibilityError(PdivError, ArithmeticError):
    """Exact division by a power of p that does not divide."""


class EmbeddingError(PdivError):
    """No embedding between the requested rings."""


class PrecisionError(PdivError):
    """Working precision too small for the requested computation."""


class ConstructionError(PdivError):
    """Input data does not define a Dieudonne module."""


class DomainError(PdivError):
    """Argument outside the domain of a truncated series."""


class ExtractionError(PdivError):
    """Point counts did not stabilise within the schedule.

    `evidence` holds the raw (N, log_size) pairs that were computed.
    """

    def __init__(self, message, evidence=None):
        super().__init__(message)
        self.evidence = evidence or []


class InconclusiveError(PdivError):
    """Sequence too short to read off the requested invariant."""


class HypothesisError(PdivError):
    """A rule was requested outside the hypotheses that justify it."""
