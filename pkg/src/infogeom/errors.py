"""Exception hierarchy shared by all modules."""


class InfogeomError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(InfogeomError, ValueError):
    pass


class CapabilityMissingError(InfogeomError):
    """The family lacks an optional capability (analytic score, metric, sampler)."""


class UnsupportedForComplexError(InfogeomError):
    """Operation is undefined for complex-valued densities."""


class NumericError(InfogeomError, ArithmeticError):
    """Non-finite value encountered. ``point`` holds the offending sample point if known."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NumericOverflowError(NumericError):
    pass


class DegenerateDensityError(NumericError):
    pass


class BudgetError(InfogeomError):
    """Quadrature grid would exceed the node budget."""


class RealificationError(InfogeomError):
    """Imaginary residue of a metric integral is above tolerance."""

    def __init__(self, message, entry=None, residue=None):
        super().__init__(message)
        self.entry = entry
        self.residue = residue
