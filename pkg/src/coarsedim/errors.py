"""Shared error types and the violation record used by all validators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One failed check from a validator.

    kind is a short machine-readable tag ("symmetry", "triangle", ...),
    subject names the offending points/elements/members by index, and
    message is the human-readable account with the actual numbers.
    """

    kind: str
    subject: tuple
    message: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "subject": list(self.subject), "message": self.message}


class ResolutionError(KeyError):
    """A named object (space, group, cover, file) could not be found."""

    def __str__(self) -> str:
        # KeyError would repr() the message and add quotes around it.
        return self.args[0] if self.args else ""


class CapExceededError(ValueError):
    """An exact search was asked to run above its configured size cap."""


class InternalInvariantError(AssertionError):
    """A postcondition that is supposed to hold unconditionally failed.

    Raising this means the implementation is wrong, not the input; callers
    should never catch it except to abort.
    """
