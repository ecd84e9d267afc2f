"""Exception types shared across the package."""


class TopotextError(Exception):
    """Base class for errors raised by topotext."""


class EmptyCloudError(TopotextError):
    """A document produced no points (no in-vocabulary tokens)."""


class BudgetExceededError(TopotextError):
    """The Rips complex would exceed the configured simplex budget."""


class UnsupportedDimensionError(TopotextError):
    """Operation is only implemented for low ambient dimensions."""


class FiltrationError(TopotextError):
    """A filtration violates the face property or is otherwise malformed."""


class DegenerateComponentError(TopotextError):
    """EM collapsed a mixture component onto a single point repeatedly."""


class ConfigError(TopotextError):
    """Invalid pipeline configuration (exit code 2 in the CLI)."""


class DataError(TopotextError):
    """Unreadable or malformed input data (exit code 3 in the CLI)."""
