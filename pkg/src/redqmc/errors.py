"""Exception types.

Every error carries a short machine-readable ``code`` and, where it makes
sense, the offending coordinate (``index``, 1-based) or input ``line``.
"""

from __future__ import annotations


class ReducedQMCError(ValueError):
    code = "error"

    def __init__(self, message: str, *, index: int | None = None,
                 line: int | None = None):
        self.index = index
        self.line = line
        where = []
        if index is not None:
            where.append(f"index {index}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class InvalidParameterError(ReducedQMCError):
    code = "invalid-parameter"


class UnsupportedParameterError(ReducedQMCError):
    code = "unsupported-parameter"


class DimensionMismatchError(ReducedQMCError):
    code = "dimension-mismatch"


class CapExceededError(ReducedQMCError):
    code = "cap-exceeded"


class NumericDomainError(ReducedQMCError):
    code = "numeric-domain"


class ParseError(ReducedQMCError):
    code = "parse-error"


class MissingEntryError(ReducedQMCError):
    code = "missing-entry"

    def __init__(self, message: str, missing=()):
        self.missing = tuple(missing)
        super().__init__(message)


class FactorizationError(ReducedQMCError):
    code = "factorization"
