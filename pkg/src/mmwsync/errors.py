"""Exception types shared across the package."""


class MmwSyncError(Exception):
    """Base class for all package-specific errors."""


class InvalidParams(MmwSyncError):
    """Parameter vector violates a precondition (e.g. non-positive noise variance)."""


class DimensionMismatch(MmwSyncError):
    """Matrix/vector dimensions do not agree."""


class LengthMismatch(MmwSyncError):
    """Sequences that must share a length do not."""


class CholeskyFailure(MmwSyncError):
    """Gram matrix of the combiner is numerically singular."""


class DegenerateSpectrum(MmwSyncError):
    """Periodogram is identically zero; no frequency peak exists."""


class SingularFim(MmwSyncError):
    """Fisher information matrix is singular and cannot be inverted.

    Carries ``chain`` (0-based index) when a zero amplitude is the cause.
    """

    def __init__(self, message, chain=None):
        super().__init__(message)
        self.chain = chain


class ZeroTruth(MmwSyncError):
    """A normalizing true parameter value is exactly zero."""

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class ConfigError(MmwSyncError):
    """Config file is missing, unreadable, or contains invalid values."""
