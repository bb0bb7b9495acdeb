"""Exception hierarchy shared by every module."""

from __future__ import annotations


class CriteriaError(Exception):
    """Base class for all errors raised by koopman_criteria."""


class ExprSyntaxError(CriteriaError, SyntaxError):
    """Malformed family expression. ``offset`` is the 0-based byte offset."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.msg = message
        self.offset = offset
        self.text = text


class UnknownIdentifier(ExprSyntaxError):
    pass


class DomainError(CriteriaError, ValueError):
    pass


class DimensionMismatch(CriteriaError, ValueError):
    pass


class SingularMatrix(CriteriaError, ValueError):
    pass


class NotPositiveDefinite(CriteriaError, ValueError):
    pass


class InvalidHellingerValue(CriteriaError, ValueError):
    pass


class IndexOutOfRange(CriteriaError, IndexError):
    pass


class LengthMismatch(CriteriaError, ValueError):
    pass


class ZeroBaseVector(CriteriaError, ValueError):
    pass


class NonPositiveLambda(CriteriaError, ValueError):
    pass


class ZeroLambda(CriteriaError, ValueError):
    """Raised by the expansion form of F_lambda; ``direct`` holds det(diag(lam) + X^T X)."""

    def __init__(self, message: str, direct: float):
        super().__init__(message)
        self.direct = direct


class UnsupportedKindForM(CriteriaError, ValueError):
    pass


class UnsupportedGroup(CriteriaError, ValueError):
    pass


class SingularGram(CriteriaError, ValueError):
    pass


class UnsupportedTermShape(CriteriaError, ValueError):
    pass


class PrerequisiteNotMet(CriteriaError):
    pass


class InvalidGroupTable(CriteriaError, ValueError):
    pass


class SizeLimitExceeded(CriteriaError, ValueError):
    pass


class ConfigError(CriteriaError):
    pass
