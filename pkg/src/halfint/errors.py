"""Exception types raised across the package."""


class HalfintError(Exception):
    """Base class for all package errors."""


class UnsupportedField(HalfintError):
    pass


class DomainError(HalfintError):
    pass


class NotTotallyPositive(HalfintError):
    pass


class InvalidTau(HalfintError):
    pass


class MissingEntry(HalfintError):
    pass


class NoNegativeNormUnit(HalfintError):
    pass


class SquareInput(HalfintError):
    pass


class IncompleteSeed(HalfintError):
    pass


class OutOfBound(HalfintError):
    pass


class IncompleteTable(HalfintError):
    pass


class MissingMirror(HalfintError):
    pass


class ConvergenceDomain(HalfintError):
    pass


class NotInUpperHalfPlane(HalfintError):
    pass


class ZeroDenominator(HalfintError):
    pass


class PoleOnGrid(HalfintError):
    pass


class AllZeroOnSqfree(HalfintError):
    pass


class FormatError(HalfintError):
    """Malformed table, eigen-system or element text."""
