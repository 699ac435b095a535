"""Exception and warning types shared across the package."""


class CapacityError(ValueError):
    """A documented support bound was exceeded (e.g. Stirling row size)."""


class NormalizationError(ArithmeticError):
    """A probability table failed its normalization check."""


class QuadratureError(ArithmeticError):
    """Adaptive integration exhausted its refinement budget.

    Attributes:
        last_estimate: The error estimate at the point the budget ran out.
    """

    def __init__(self, message: str, last_estimate: float = float("nan")):
        super().__init__(message)
        self.last_estimate = last_estimate


class PrecisionWarning(UserWarning):
    """An alternating sum lost enough precision to matter.

    Attributes:
        estimate: Relative cancellation-error estimate for the returned value.
    """

    def __init__(self, message: str, estimate: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate
