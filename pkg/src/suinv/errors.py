"""Exception types shared across the package."""


class SuinvError(Exception):
    """Base class for package errors."""


class InvalidDimensionError(SuinvError, ValueError):
    pass


class InconsistencyError(SuinvError, ValueError):
    """Operands disagree on local dimension, particle count or length."""


class ParticleIndexError(SuinvError, IndexError):
    pass


class InvalidOrderError(SuinvError, ValueError):
    pass


class InsufficientParticlesError(SuinvError, ValueError):
    pass


class DegeneracyError(SuinvError, RuntimeError):
    """Eigenvalue clustering could not be resolved unambiguously.

    ``diagnostics`` carries the offending gaps and thresholds.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
