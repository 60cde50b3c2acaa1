"""Shared exception types."""


class HstructError(Exception):
    """Base class for all package errors."""


class BudgetExceededError(HstructError):
    """An enumeration would exceed the configured work budget."""


class FormulaSyntaxError(HstructError):
    """Surface syntax error; carries the 0-based offset of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class BindError(HstructError):
    """Formula cannot be interpreted in a given model (scalar too large, bad basis index)."""


class EvalError(HstructError):
    """Evaluation failed, e.g. a free variable has no assigned value."""


class FitError(HstructError):
    """A regression/fit could not be carried out on the available sweep data."""


class NotLinearError(HstructError):
    """Internal: a formula is not a boolean combination of linear equations."""


class VerificationError(HstructError):
    """A verification precondition failed (non-disjoint sets, not a function, ...)."""


class ConfigError(HstructError):
    """Experiment configuration is malformed."""
