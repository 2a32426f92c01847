"""Exception types raised by agilegate.

Every error derives from :class:`AgileGateError`. Errors raised deep inside the
scoring code are annotated with context (construct, aspect, practice, stage)
as they propagate, so the final message says where the problem surfaced.
"""

from __future__ import annotations


class AgileGateError(Exception):
    """Base class for all agilegate errors."""

    def __init__(self, message: str = "") -> None:
        super().__init__(message)
        self.message = message
        self.context: list[tuple[str, str]] = []

    def add_context(self, key: str, value: str) -> AgileGateError:
        # Outermost context is appended last; rendered outermost-first.
        self.context.append((key, value))
        return self

    def __str__(self) -> str:
        if not self.context:
            return self.message
        where = ", ".join(f"{k}={v}" for k, v in reversed(self.context))
        return f"{self.message} [{where}]"


class ParseError(AgileGateError):
    """A document is not well-formed JSON (or not the expected JSON shape)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(AgileGateError):
    """A catalog violates one or more invariants; carries every violation."""

    def __init__(self, violations: list) -> None:
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"{len(violations)} catalog violation(s): {lines}")
        self.violations = list(violations)


class InputError(AgileGateError):
    """A profile, objectives, responses or policies document is invalid."""


class UnknownPractice(AgileGateError, LookupError):
    pass


class UnknownObjective(AgileGateError, LookupError):
    pass


class UnknownProfileId(AgileGateError, LookupError):
    pass


class UnknownCharacteristic(AgileGateError, LookupError):
    pass


class ScaleMismatch(AgileGateError, ValueError):
    pass


class NotApplicableDisallowed(AgileGateError, ValueError):
    pass


class RoleMismatch(AgileGateError, ValueError):
    pass


class MissingAnswer(AgileGateError):
    pass


class NoUsableAnswers(AgileGateError):
    pass


class EmptyFactorSet(AgileGateError, ValueError):
    pass


class OutOfRangeDegree(AgileGateError, ValueError):
    pass
