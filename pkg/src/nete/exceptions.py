"""Exception types shared across the package."""


class NeteError(Exception):
    """Base class for all estimation errors."""


class InsufficientDataError(NeteError, ValueError):
    """Too few observations for the requested operation."""


class InfiniteMomentError(NeteError, ValueError):
    """The tail moment 1 / (1 - alpha * gamma) does not exist (alpha * gamma >= 1)."""


class EmptyTailError(NeteError, ValueError):
    """No observations exceed the selected threshold."""


class DegenerateDataError(NeteError, ValueError):
    """Input data is degenerate (single treatment class, constant regressor, ...)."""


class DataFormatError(NeteError, ValueError):
    """A data file failed to parse or does not match the expected schema."""

