"""Exception hierarchy."""


class GKForgeError(Exception):
    """Base class for all errors raised by gkforge."""


class DimensionError(GKForgeError, ValueError):
    """Shapes or ambient dimensions do not match."""


class DifferentialError(GKForgeError):
    """A prescribed differential does not square to zero."""

    def __init__(self, message: str, generator: int | None = None):
        super().__init__(message)
        self.generator = generator


class NotNilpotentError(GKForgeError):
    """The nilpotent filtration stalls below the full dual space."""

    def __init__(self, message: str, stalled_step: int, stalled_dim: int):
        super().__init__(message)
        self.stalled_step = stalled_step
        self.stalled_dim = stalled_dim


class TwistNotClosedError(GKForgeError):
    """The 3-form twist H is not closed."""


class MasseyUndefinedError(GKForgeError):
    """A Massey triple product was requested where the products do not vanish."""


class StructureError(GKForgeError):
    """A generalized complex or Kaehler structure fails a structural requirement."""


class CatalogError(GKForgeError):
    """Malformed catalog input or unknown entry."""
