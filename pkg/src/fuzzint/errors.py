"""Exception types shared across the package."""


class FuzzintError(Exception):
    """Base class for all library errors."""


class ParseError(FuzzintError):
    """Malformed expression text; ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvalDomainError(FuzzintError):
    """Evaluation left the domain of an operation (sqrt of a negative, ln of zero, ...)."""


class DomainMismatchError(FuzzintError):
    """Two functions that must share a domain do not."""


class MeasureError(FuzzintError):
    """A set function fails the monotone-measure requirements."""


class PreconditionError(FuzzintError):
    """A documented precondition of a solver or checker is violated."""


class RangeEscapeError(FuzzintError):
    """A pseudo-arithmetic result left the declared value interval."""


class QuadratureError(FuzzintError):
    """Panel refinement hit its cap before the requested accuracy."""


class ConfigError(FuzzintError):
    """A run configuration does not validate."""
