"""Exception types shared across the simulator."""


class SimulatorError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(SimulatorError, ValueError):
    """A scalar argument or configuration field is outside its valid range."""


class InvalidCombinerError(SimulatorError, ValueError):
    """A combiner is unusable: zero vector, wrong shape, or off-bank entries."""


class SearchBudgetError(SimulatorError):
    """An exhaustive search would exceed the configured evaluation budget."""

    def __init__(self, message: str, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class RankDeficientChannelError(SimulatorError):
    """The effective channel is too ill-conditioned for zero forcing."""


class InsufficientSamplesError(SimulatorError):
    """Too few samples were supplied to a statistical estimator."""


class ConfigError(SimulatorError):
    """A configuration document failed to parse or validate."""
