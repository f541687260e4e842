"""Exception types raised across the package."""


class Sl3Error(ValueError):
    """Base class for all input and decision errors."""


class NotUnimodular(Sl3Error):
    pass


class DegenerateType(Sl3Error):
    pass


class NotHessenberg(Sl3Error):
    pass


class NoUnimodularCompletion(Sl3Error):
    pass


class NotPrimitive(Sl3Error):
    pass


class ReduciblePolynomial(Sl3Error):
    pass


class SpectrumMismatch(Sl3Error):
    pass


class NoFactorization(Sl3Error):
    pass


class UnsupportedFormat(Sl3Error):
    pass


class RegionTooLarge(Sl3Error):
    """Raised when a lattice scan would exceed the configured cell budget."""

    def __init__(self, cells, budget):
        super().__init__(f"bounding box has {cells} cells, budget is {budget}")
        self.cells = cells
        self.budget = budget


class BudgetExceeded(Sl3Error):
    """Raised when a survey stops before stabilising; carries the partial report."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
