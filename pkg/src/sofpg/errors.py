"""Exception types shared across the package."""


class SofpgError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(SofpgError, ValueError):
    """Matrix or vector dimensions are inconsistent with the operation."""


class DomainError(SofpgError, ValueError):
    """A scalar parameter lies outside the admissible domain."""


class NumericalError(SofpgError, RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class InstabilityError(SofpgError, RuntimeError):
    """The damped closed loop is not stable, so the requested quantity does not exist."""


class DivergenceError(SofpgError, RuntimeError):
    """A simulated state left the admissible floating range.

    Attributes carry enough context to locate the offending rollout:
    `step` is the time index at which the norm guard fired, `trajectory`
    the index within a batch (None for single rollouts), and `sign`
    the perturbation sign (+1/-1) for two-point estimates.
    """

    def __init__(self, message, step=None, trajectory=None, sign=None):
        super().__init__(message)
        self.step = step
        self.trajectory = trajectory
        self.sign = sign


class ConfigError(SofpgError, ValueError):
    """A configuration file or value could not be interpreted."""
