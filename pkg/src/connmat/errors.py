"""Exception types shared by the pipeline stages and the CLI."""

from __future__ import annotations


class ConnmatError(Exception):
    """Base class for all errors raised by connmat."""


class ValidationError(ConnmatError):
    """Input does not satisfy a structural requirement.

    ``violations`` holds human-readable witnesses, one per problem found.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        self.message = message
        self.violations = list(violations or [])
        if self.violations:
            message = message + ": " + "; ".join(self.violations)
        super().__init__(message)


class InternalConsistencyError(ConnmatError):
    """An invariant that the pipeline guarantees was found broken."""


class DenseSizeError(ConnmatError):
    """A dense (oracle/debug) computation was refused because the input is too large."""
