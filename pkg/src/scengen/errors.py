"""Exception hierarchy shared by all scengen modules.

Every error carries a stable machine-readable ``code`` plus a human
message; the HTTP layer maps codes onto status responses.
"""

from __future__ import annotations


class ScengenError(Exception):
    """Base class for all scengen errors."""

    def __init__(self, code: str, message: str, **details: object):
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details


class ParseError(ScengenError):
    """Input document could not be parsed (malformed XML, bad numbers)."""


class StructuralError(ScengenError):
    """Parsed document violates structural rules (dangling links, empty roads)."""


class DomainError(ScengenError):
    """Operation called with arguments outside its domain."""


class NotFoundError(DomainError):
    """A referenced entity (map, node, region, actor, scenario) does not exist."""


class ConflictError(ScengenError):
    """Operation conflicts with current state (occupied node, ineligible region)."""


class ValidationError(ScengenError):
    """One or more invariants violated; ``failures`` lists every breach."""

    def __init__(self, message: str, failures: list[str] | None = None, **details: object):
        super().__init__("invalid", message, **details)
        self.failures = failures or [message]


class PlanningError(ScengenError):
    """Trajectory planning failed (goal unreachable from spawn)."""


class FormatError(ScengenError):
    """Serialized document has the wrong version or is missing mandatory fields."""


class StaleMapError(FormatError):
    """Scenario document references a map whose source bytes changed since export."""
