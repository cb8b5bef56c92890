"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid experiment configuration or parameter combination."""


class InvalidParamsError(ConfigError):
    """Parameter validity condition eta*psi(2*eta/a) >= 2*a does not hold."""


class MomentDivergenceError(ConfigError):
    """The requested raw moment of a reward distribution does not exist."""


class HorizonExceededError(RuntimeError):
    """A policy was asked to act past its configured horizon."""


class NotEnoughSamplesError(ValueError):
    """An estimator needs more samples than it was given."""
