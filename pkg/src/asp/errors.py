"""Exception types raised across the package."""


class ASPError(Exception):
    """Base class for all errors raised by :mod:`asp`."""


class DimensionMismatch(ASPError, ValueError):
    pass


class NonFinite(ASPError, ValueError):
    pass


class NotSymmetric(ASPError, ValueError):
    pass


class NegativeEigenvalue(ASPError, ValueError):
    """A matrix declared positive semi-definite has a clearly negative eigenvalue."""


class DenominatorNearZero(ASPError, ArithmeticError):
    """The ``1 + u'Pu`` term of a rank-1 inverse update is (numerically) non-positive."""


class RankDeficient(ASPError, ArithmeticError):
    pass


class ZeroDiagonal(ASPError, ArithmeticError):
    pass


class UnderdeterminedNewState(ASPError, ArithmeticError):
    pass


class ConfigMismatch(ASPError, ValueError):
    pass


class NotConverged(ASPError, ArithmeticError):
    """An iterative method ran out of budget.

    Attributes
    ----------
    residual : float
        Final residual measure reached by the method.
    trace : IterationTrace or None
        Per-iteration history, when the method records one.
    """

    def __init__(self, message, residual=float("nan"), trace=None):
        super().__init__(message)
        self.residual = residual
        self.trace = trace


class ConfigError(ASPError, ValueError):
    """An experiment configuration is invalid."""
