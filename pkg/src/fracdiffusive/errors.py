"""Exception types raised across the package."""


class FracDiffusiveError(Exception):
    """Base class for all package errors."""


class CancellationLoss(FracDiffusiveError, ArithmeticError):
    """Alternating power series lost too many digits to cancellation."""


class QuadratureFailure(FracDiffusiveError, ArithmeticError):
    """An adaptive quadrature did not reach its tolerance within budget."""


class InvalidOrder(FracDiffusiveError, ValueError):
    """Asymptotic order or fractional order outside its admissible range."""


class GridTooCoarse(FracDiffusiveError, ValueError):
    pass


class InvalidExponent(FracDiffusiveError, ValueError):
    pass


class InadmissibleScenario(FracDiffusiveError, ValueError):
    """Norm exponent outside the range where the decay estimate applies."""


class DegenerateFit(FracDiffusiveError, ValueError):
    pass
