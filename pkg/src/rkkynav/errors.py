"""Exception types raised across the package."""


class RkkyNavError(Exception):
    """Base class for all package errors."""


class NonHermitian(RkkyNavError, ValueError):
    pass


class NonSquare(RkkyNavError, ValueError):
    pass


class EpsilonOutOfRange(RkkyNavError, ValueError):
    pass


class UnsupportedSpin(RkkyNavError, ValueError):
    pass


class WeightCountMismatch(RkkyNavError, ValueError):
    pass


class BadSubsystem(RkkyNavError, ValueError):
    pass


class BadDimension(RkkyNavError, ValueError):
    pass


class NegativeTime(RkkyNavError, ValueError):
    pass


class ZeroDamping(RkkyNavError, ValueError):
    pass


class DomainError(RkkyNavError, ValueError):
    pass


class InsufficientSamples(RkkyNavError, ValueError):
    pass


class FastPathUnavailable(RkkyNavError):
    """Drives are not proportional, so a single ETI cannot describe them."""


class NumericalNonConvergence(RkkyNavError, ArithmeticError):
    """Base for numerical procedures that gave up before reaching tolerance."""


class QuadratureNonConvergence(NumericalNonConvergence):
    pass


class NonConvergentStepping(NumericalNonConvergence):
    pass


class ConfigParseError(RkkyNavError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class BadInput(RkkyNavError, ValueError):
    pass
