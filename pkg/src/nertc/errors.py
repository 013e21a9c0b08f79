"""Shared exception types for file ingestion and lookups."""

from __future__ import annotations


class FormatError(ValueError):
    """A structured input file violates its documented format.

    Carries the path and 1-based line number when they are known so CLI
    diagnostics can point at the offending line.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = path if line is None else f"{path}:{line}"
            prefix += ": "
        super().__init__(prefix + message)


class UnknownMidError(KeyError):
    """Lookup of a machine id that is not present in the snapshot."""

    def __init__(self, mid: str):
        self.mid = mid
        super().__init__(mid)

    def __str__(self) -> str:  # KeyError quotes its arg; keep the message readable
        return f"unknown mid: {self.mid}"


class UnresolvableTypeError(ValueError):
    """An entity offers no declared type to resolve against."""
