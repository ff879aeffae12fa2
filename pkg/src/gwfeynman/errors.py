"""Exception hierarchy.  Each error names the contract that was violated."""


class GWFeynmanError(Exception):
    pass


class ZeroConstantTerm(GWFeynmanError, ZeroDivisionError):
    pass


class BadConstantTerm(GWFeynmanError, ValueError):
    pass


class NonzeroInnerConstant(GWFeynmanError, ValueError):
    pass


class NotInvertibleSeries(GWFeynmanError, ValueError):
    pass


class UnsupportedTarget(GWFeynmanError, ValueError):
    pass


class UnboundAmbiguity(GWFeynmanError, ValueError):
    pass


class AmbiguityNonlinear(GWFeynmanError, ValueError):
    """Two ambiguity unknowns were multiplied together."""


class GaugeDegreeViolation(GWFeynmanError, ValueError):
    pass


class UnstablePair(GWFeynmanError, ValueError):
    pass


class MissingCorrelator(GWFeynmanError, KeyError):
    pass


class TruncationOverflow(GWFeynmanError, ValueError):
    pass


class UnresolvedAmbiguity(GWFeynmanError, ValueError):
    pass


class ConfigError(GWFeynmanError, ValueError):
    pass
