"""Exception hierarchy shared by every engine and the CLI.

Each class carries a stable ``code`` (used in CLI error lines) and the process
exit status the CLI maps it to.
"""

from __future__ import annotations


class VarsigError(Exception):
    code = "ERROR"
    exit_status = 1

    def __init__(self, message: str, where: str | None = None):
        super().__init__(message)
        self.message = message
        self.where = where

    def __str__(self) -> str:
        if self.where:
            return f"{self.where}: {self.message}"
        return self.message


class DomainError(VarsigError, ValueError):
    code = "DOMAIN_ERROR"
    exit_status = 6


class NegativeVariance(DomainError):
    code = "NEGATIVE_VARIANCE"
    exit_status = 6


class EmptyInput(DomainError):
    code = "EMPTY_INPUT"
    exit_status = 6


class NoInformation(VarsigError):
    """Raised when asked to draw a signal whose variance is infinite."""

    code = "NO_INFORMATION"
    exit_status = 5


class DegeneratePosterior(VarsigError):
    """Posterior mass piles up where the noise variance was floored."""

    code = "DEGENERATE_POSTERIOR"
    exit_status = 3


class ZeroEvidence(VarsigError):
    """Signal has zero likelihood under every regime with prior support."""

    code = "ZERO_EVIDENCE"
    exit_status = 4


class ParseError(VarsigError):
    code = "PARSE_ERROR"
    exit_status = 2


class ValidationError(VarsigError):
    """Config failed schema validation; ``errors`` holds (field_path, message) pairs."""

    code = "VALIDATION_ERROR"
    exit_status = 2

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        path, msg = self.errors[0] if self.errors else ("", "invalid config")
        text = "; ".join(f"{p}: {m}" for p, m in self.errors)
        super().__init__(text, where=None)
        self.where = path
        self.first_message = msg

    def __str__(self) -> str:
        return self.message
