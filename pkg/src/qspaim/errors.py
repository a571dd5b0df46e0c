"""Exception types shared across the package."""


class QspAimError(Exception):
    """Base class for all package errors."""


class DomainError(QspAimError, ValueError):
    """An argument lies outside the domain of a formula."""


class DivergentScheduleError(QspAimError):
    """The direct compiler hit a singular end of the theta -> omega map.

    ``limit`` is ``"P->0"`` (omega -> 0, duration -> infinity) or
    ``"P->1"`` (omega -> infinity).
    """

    def __init__(self, theta, limit, theta_min):
        self.theta = theta
        self.limit = limit
        self.theta_min = theta_min
        super().__init__(
            f"theta={theta!r} is outside ({theta_min}, pi - {theta_min}); "
            f"limit {limit} makes the schedule degenerate"
        )


class NumericError(QspAimError):
    """The propagator cannot integrate the requested schedule."""
