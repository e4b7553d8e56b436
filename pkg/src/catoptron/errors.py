"""Exception types shared across the package."""


class CatoptronError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(CatoptronError):
    """Operands live on incompatible spaces or have wrong shapes."""


class SpaceError(CatoptronError):
    """An operation expected a different kind of space (e.g. composite)."""


class TruncationError(CatoptronError):
    """The truncated Fock basis is too small for the requested state."""


class DegenerateCatError(CatoptronError):
    """Cat-state normalization collapses (alpha -> 0 with phase -> pi)."""


class DegenerateDenominatorError(CatoptronError):
    """A normalized functional term has no gradient information here."""


class NonFiniteError(CatoptronError):
    """Amplitudes overflowed or became NaN during propagation."""


class PositivityError(CatoptronError):
    """Density-matrix positivity violated beyond tolerance (dt too large)."""


class ConfigError(CatoptronError):
    """Experiment configuration is missing or inconsistent."""
