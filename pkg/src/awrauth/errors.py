"""Exception types shared across the package."""


class AwrAuthError(Exception):
    """Base class for all package-specific errors."""


class OverlongMessage(AwrAuthError):
    """Message exceeds the block budget the family's epsilon was declared for."""


class SpaceTooLarge(AwrAuthError):
    """Requested exhaustive enumeration exceeds the configured guard."""


class NoAlternativeKey(AwrAuthError):
    """No second key consistent with the given (message, tag) pair exists."""


class DimensionMismatch(AwrAuthError):
    """Distributions are defined over key spaces of different sizes."""


class ParamOutOfRange(AwrAuthError):
    """A fixture parameter lies outside its valid range."""


class PoolExhausted(AwrAuthError):
    """The one-time key pool is empty; the round must abort."""


class InvalidState(AwrAuthError):
    """Session operation called outside its allowed state."""


class StrategyNotFiring(AwrAuthError):
    """A substitution rule returned its input unchanged."""


class ConfigMismatch(AwrAuthError):
    """The two endpoints disagree on session parameters."""


class FrameMalformed(AwrAuthError):
    """A received frame violates the wire format."""
