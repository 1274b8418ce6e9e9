"""Exception types shared across the package."""


class NSFLabError(Exception):
    """Base class for all package errors."""


class InvalidStateError(NSFLabError):
    """A thermodynamic state violates positivity (v > 0, theta > 0)."""


class LaxConditionError(NSFLabError):
    """A requested shock violates the Lax admissibility ordering."""


class NonConvergenceError(NSFLabError):
    """An iterative solve (Newton, shooting, bisection) failed to converge."""


class StabilityConfigurationError(NSFLabError):
    """Traveling-wave endpoints have the wrong saddle/node structure.

    Signals an inconsistent (sigma, family) combination handed to the
    profile solver.
    """


class PositivityError(NSFLabError):
    """The evolving solution lost positivity of v or theta."""

    def __init__(self, message, node=None, time=None):
        super().__init__(message)
        self.node = node
        self.time = time


class WaveSeparationError(NSFLabError):
    """The two shock layers failed to stay separated."""


class BoundaryContaminationError(NSFLabError):
    """The solution deviates from the far-field state near the domain ends."""


class ConfigError(NSFLabError):
    """A scenario configuration is malformed or contains unknown keys."""


class StateFormatError(NSFLabError):
    """A state file is malformed, truncated, or has a wrong version."""
