"""Exception hierarchy shared by every module."""


class PTBerryError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(PTBerryError, ValueError):
    """Parameters outside the unbroken-PT domain (a**2 <= b**2, a == 0, non-finite)."""


class GaugeSingularError(PTBerryError):
    """An eigenvector of the fixed gauge patch has (numerically) vanishing norm."""


class NotPositiveDefiniteError(PTBerryError, ValueError):
    """A metric that must be Hermitian positive definite is not."""


class ResolutionError(PTBerryError, ValueError):
    """Fixed-step integration is too coarse for the spectrum and duration."""


class NonAdiabaticError(PTBerryError):
    """The evolved state left the initial branch."""


class ConsistencyError(PTBerryError):
    """Two independent routes to the same quantity disagree beyond tolerance."""


class PathError(PTBerryError, ValueError):
    """A loop specification is not closed or otherwise malformed."""
