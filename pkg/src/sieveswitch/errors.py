"""Exception hierarchy shared by every layer of the package."""


class SieveSwitchError(Exception):
    """Base class for all errors raised by sieveswitch."""


class OutOfRangeError(SieveSwitchError, ValueError):
    """An argument lies outside the tabulated or admissible range."""


class CapacityError(SieveSwitchError, ValueError):
    """A requested index or dimension exceeds a configured cap."""


class ConvergenceError(SieveSwitchError, RuntimeError):
    def __init__(self, message: str, last_delta: float):
        super().__init__(message)
        self.last_delta = last_delta


class InconsistencyError(SieveSwitchError, RuntimeError):
    """Two tables that should agree analytically do not."""


class RoutePreconditionError(SieveSwitchError, ValueError):
    """The requested evaluation route is not valid for the given weight."""


class BudgetExceededError(SieveSwitchError, RuntimeError):
    def __init__(self, message: str, partial_value: float, error_estimate: float):
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate


class ConfigError(SieveSwitchError, ValueError):
    """A scenario or weight configuration violates its invariants."""
