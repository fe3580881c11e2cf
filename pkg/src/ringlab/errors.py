"""Exception hierarchy shared by every ringlab module."""

from __future__ import annotations


class RingLabError(Exception):
    """Base class for all ringlab errors."""


class DomainError(RingLabError, ValueError):
    """An argument lies outside the domain of a kernel or formula."""


class SingularityError(RingLabError, ValueError):
    """Evaluation at a point where the kernel is singular (coincident points)."""


class QuadratureError(RingLabError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance.

    The best available estimate and its error bound are kept on the exception.
    """

    def __init__(self, message: str, estimate: float, error: float) -> None:
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error


class ConfigError(RingLabError, ValueError):
    """Invalid configuration or initial data."""


class SimulationBlowup(RingLabError, ArithmeticError):
    """A particle left the physical half-plane r > 0."""

    def __init__(self, message: str, particle: int, time: float) -> None:
        super().__init__(f"{message} (particle {particle}, t={time!r})")
        self.particle = particle
        self.time = time


class CollisionError(RingLabError, ArithmeticError):
    """Two centres of the reduced system collided (or got closer than the floor)."""

    def __init__(self, message: str, time: float) -> None:
        super().__init__(f"{message} (t={time!r})")
        self.time = time


class DegeneratePairError(RingLabError, ValueError):
    """Two-ring reduction with a1 + a2 = 0 (vortex dipole)."""


class NonPeriodicLevelError(RingLabError, ValueError):
    """A period was requested on a level C_E >= C* that carries no closed orbit."""


class ConsistencyError(RingLabError, RuntimeError):
    """Internal consistency check failed (e.g. root count vs. branch)."""


class NotFoundError(RingLabError, RuntimeError):
    """A parameter search exhausted its range without success."""
