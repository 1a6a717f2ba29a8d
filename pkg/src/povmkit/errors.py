"""Exception hierarchy shared across the package."""


class PovmkitError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(PovmkitError):
    """Structural error: operands live on incompatible spaces."""


class ValidationError(PovmkitError):
    """A POVM or state failed its defining checks beyond tolerance."""


class FormatError(PovmkitError):
    """Malformed on-disk representation (ragged/non-square matrices, bad JSON shape)."""


class CutoffError(PovmkitError):
    """Requested construction is unreliable at the given Fock cutoff."""


class GridError(PovmkitError):
    """Phase-space grid too small or incompatible with the requested operation."""


class DecompositionError(PovmkitError):
    """Convex decomposition could not be realized numerically."""
