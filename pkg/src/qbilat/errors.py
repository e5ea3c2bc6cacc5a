"""Exception hierarchy shared by every qbilat module."""


class QBilatError(Exception):
    """Base class for all library errors."""


class DomainError(QBilatError, ValueError):
    """Parameters lie outside the region where a series or formula is valid."""


class PoleError(QBilatError, ZeroDivisionError):
    """Evaluation hit a pole (a vanishing denominator)."""


class BranchPointError(QBilatError, ValueError):
    """A power was requested at the branch point of the logarithm."""


class BudgetError(QBilatError, RuntimeError):
    """The term or factor budget ran out before the tolerance was met."""


class PrecisionError(QBilatError, ArithmeticError):
    """A result could not be separated from rounding noise or is not finite."""


class NotInvertibleError(QBilatError, ZeroDivisionError):
    """A truncated series has no known nonzero coefficient to invert."""


class PrecisionContractError(QBilatError, ValueError):
    """A formal computation cannot be carried to the requested order."""


class InsufficientDataError(QBilatError, ValueError):
    """Too few sample points for the requested extrapolation order."""
