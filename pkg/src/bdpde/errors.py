"""Exception types shared across the solver."""


class ConfigurationError(ValueError):
    """A run or operation was configured with invalid parameters."""


class DegenerateSolutionError(RuntimeError):
    """The reconstructed solution has zero L1 mass; resampling is impossible."""


class NumericalBlowupError(RuntimeError):
    """A non-finite value appeared in the reconstruction or field evaluation."""
