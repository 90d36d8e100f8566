"""Exception taxonomy shared by all rotspec modules."""


class RotspecError(Exception):
    """Base class for all errors raised by this package."""


class DomainGuardError(RotspecError):
    """A state left the admissible region (unit disk interior, f2 > 0).

    Raised instead of returning non-finite values: the profile ODE is
    singular on the unit circle and on the rotation axis.
    """


class IntegrationError(RotspecError):
    """Base class for integrator failures."""


class StepLimitExceededError(IntegrationError):
    """The integrator hit its step budget (or its step size underflowed)."""


class NonFiniteDerivativeError(IntegrationError):
    """The right-hand side returned NaN or infinity."""

    def __init__(self, u: float, message: str = ""):
        self.u = u
        super().__init__(message or f"non-finite derivative at u={u!r}")


class EventNotFoundError(RotspecError):
    """integrate_until reached its endpoint without the event firing."""


class ShootingError(RotspecError):
    """Base class for failures of the periodic-profile search."""


class LargeResidualError(ShootingError):
    """The half flight failed outright; no meaningful residual exists.

    Used as a sentinel for initial radii outside the oscillating regime
    (the flight hit a domain guard or never reached the turning angle).
    """


class NoSignChangeError(ShootingError):
    """The shooting residual has no sign change over the search bracket."""


class NonConvergenceError(ShootingError):
    """Root polishing did not reach the requested residual tolerance."""


class ConfigError(RotspecError):
    """Inconsistent or malformed run configuration (CLI usage error)."""
