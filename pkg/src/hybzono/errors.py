"""Exception types shared across the package."""


class HybZonoError(Exception):
    """Base class for all package errors."""


class DimensionError(HybZonoError, ValueError):
    """Matrix/vector shapes do not agree."""


class InvalidInputError(HybZonoError, ValueError):
    """Malformed input data (bad file, bad incidence matrix, lo > hi, ...)."""


class EmptySetError(HybZonoError, RuntimeError):
    """A query that requires a nonempty set was given an empty one."""


class LeafCapError(HybZonoError, RuntimeError):
    """Number of binary factors exceeds the configured enumeration cap."""


class SolverError(HybZonoError, RuntimeError):
    """The LP solver stalled numerically (distinct from infeasibility)."""


class InconsistencyError(HybZonoError, RuntimeError):
    """Measurement update produced an empty posterior."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class UncertifiedError(HybZonoError, RuntimeError):
    """An input-output set with an uncertified error bound was rejected."""


class TrainingError(HybZonoError, RuntimeError):
    """Network training diverged (non-finite loss)."""
