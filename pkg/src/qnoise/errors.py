"""Exception hierarchy for the qnoise engine."""


class QNoiseError(Exception):
    """Base class for all qnoise errors."""


class DomainError(QNoiseError, ValueError):
    """An argument is outside the physical domain of an operation."""


class ModelError(QNoiseError, ValueError):
    """A model is structurally invalid (non-reactive impedance,
    singular scattering construction, blocked signal path, ...)."""
