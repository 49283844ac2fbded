"""Exception hierarchy shared by every module of the package."""


class SoficRankError(Exception):
    """Base class for all library errors."""


class ParseError(SoficRankError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class IndexOutOfAlphabet(SoficRankError, ValueError):
    pass


class DomainMismatch(SoficRankError, TypeError):
    pass


class BallTooLarge(SoficRankError):
    pass


class DivisionByZero(SoficRankError, ZeroDivisionError):
    pass


class PrimeDividesDenominator(SoficRankError, ValueError):
    pass


class PrimeSearchExhausted(SoficRankError):
    pass


class RootIsolationFailed(SoficRankError, ArithmeticError):
    pass


class PointOutOfRange(SoficRankError, IndexError):
    pass


class ProductTooLarge(SoficRankError):
    pass


class ClosureTooLarge(SoficRankError):
    pass


class BadPreset(SoficRankError, ValueError):
    pass


class DomainNotField(SoficRankError, TypeError):
    pass


class SupportExplosion(SoficRankError):
    pass


class DenominatorVanishes(SoficRankError, ZeroDivisionError):
    pass


class RepresentationInvalid(SoficRankError, ValueError):
    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)


class ConfigError(SoficRankError, ValueError):
    """Configuration problem; ``path`` is a JSON path, ``line``/``column`` are 1-based."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        loc = []
        if path:
            loc.append(path)
        if line is not None:
            loc.append(f"line {line}, column {column}")
        super().__init__(f"{': '.join(loc)}: {message}" if loc else message)
