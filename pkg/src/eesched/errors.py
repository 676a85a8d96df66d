"""Exception types raised across the package."""


class SchedulingError(ValueError):
    """Base class for every error raised by eesched."""


class InstanceError(SchedulingError):
    """Structurally invalid instance (bad grid, unordered events, ...)."""


class InfeasibleDemand(SchedulingError):
    """A deadline demands data that cannot have arrived before it is due."""

    def __init__(self, j: int, demanded: float, available: float):
        self.j = j
        self.demanded = demanded
        self.available = available
        super().__init__(
            f"deadline {j} demands {demanded:.9g} cumulative units but only "
            f"{available:.9g} arrive strictly before it"
        )


class TotalsMismatch(SchedulingError):
    def __init__(self, arrived: float, demanded: float):
        self.arrived = arrived
        self.demanded = demanded
        super().__init__(
            f"total arrivals {arrived:.9g} differ from total deadline demand {demanded:.9g}"
        )


class NegativeEffectiveRho(SchedulingError):
    """Off-mode power exceeds on-mode circuit power."""


class InfeasibleUpdate(SchedulingError):
    """An online arrival carries deadlines that can no longer be met."""

    def __init__(self, message: str, event_index: int | None = None):
        self.event_index = event_index
        if event_index is not None:
            message = f"event {event_index}: {message}"
        super().__init__(message)


class CertificateError(SchedulingError):
    """A KKT optimality condition failed for the given schedule."""


class StructureMismatch(CertificateError):
    """Plan bindings contradict the rate monotonicity they imply."""


class GenerationFailed(SchedulingError):
    pass
