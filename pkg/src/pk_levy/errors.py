"""Exception hierarchy shared by every pk_levy module."""


class PKLevyError(Exception):
    """Base class for all library errors."""


class ModelError(PKLevyError):
    """A model or spec violates a structural requirement."""


class InvalidParameter(ModelError, ValueError):
    pass


class UnstableModel(ModelError):
    """Raised when the drift does not dominate the mean jump rate (mu <= 0)."""


class NonMonotoneTail(ModelError):
    pass


class NotDecomposable(ModelError):
    """The jump measure has infinite mean; truncate the model first."""


class NotADensity(ModelError):
    pass


class NotNonincreasing(ModelError):
    pass


class DomainError(PKLevyError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(PKLevyError):
    pass


class QuadratureFailure(NumericalError):
    pass


class InversionUnstable(NumericalError):
    pass


class ConfigError(PKLevyError):
    """A configuration or input file does not match its schema."""
