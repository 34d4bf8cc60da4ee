"""Exception hierarchy shared by every module of the package."""


class BiaxError(Exception):
    """Base class for all errors raised by :mod:`biaxhelm`."""


class DomainError(BiaxError, ValueError):
    """An argument lies outside the region where a representation is valid."""


class PoleError(BiaxError, ZeroDivisionError):
    """A Pochhammer symbol or Gamma factor hits a pole."""


class NonConvergence(BiaxError, ArithmeticError):
    """A series exhausted its term cap before meeting the stopping rule."""


class CoincidentPoints(DomainError):
    """Source and field point coincide (r^2 = 0)."""


class DimensionMismatch(BiaxError, ValueError):
    pass


class StepTooLarge(BiaxError, ValueError):
    """Finite-difference step violates the distance-to-boundary margin."""


class FitDegenerate(BiaxError, ValueError):
    """Too few valid samples for a least-squares exponent fit."""


class ConfigError(BiaxError, ValueError):
    pass
