"""Exception types shared by all modules."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class PreconditionError(DomainError):
    """A documented precondition does not hold (e.g. an interval is too short)."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class CapacityError(RuntimeError):
    """Requested table or buffer exceeds the configured memory budget."""


class NumericError(ArithmeticError):
    """An iterative numeric routine failed to converge."""


class DegeneratePeriodic(Exception):
    """The horocycle segment already lies on a closed horocycle."""

    def __init__(self, message, period):
        super().__init__(message)
        self.period = period
