from __future__ import annotations


class WarpError(RuntimeError):
    """Root of every error raised by the deformation library."""


class DimensionMismatchError(WarpError, ValueError):
    pass


class InvariantError(WarpError, ValueError):
    """A validated type failed one of its construction invariants."""


class SkewnessError(InvariantError):
    pass


class WarpMismatchError(WarpError):
    """Left and right warped convolutions disagree beyond tolerance."""


class DimensionGuardError(WarpError):
    pass


class DuplicateModeError(WarpError, ValueError):
    pass


class PreconditionError(WarpError, ValueError):
    pass


class MissingIntertwinerError(WarpError, KeyError):
    pass


class PrecedenceError(PreconditionError):
    pass


class SectorError(PreconditionError):
    pass


class OffShellError(PreconditionError):
    pass


class ConfigError(WarpError, ValueError):
    pass
