"""Exception hierarchy shared by every hobokit module."""

from __future__ import annotations

from dataclasses import dataclass


class HoboError(Exception):
    """Base class for all library errors."""


class DeclarationError(HoboError, ValueError):
    pass


class UnsupportedOperationError(HoboError, ValueError):
    pass


class DimensionError(HoboError, ValueError):
    pass


class ContractViolation(HoboError, ValueError):
    """A documented precondition of an operation was not met."""


class ResourceError(HoboError, MemoryError):
    pass


class SpecError(HoboError, ValueError):
    pass


class PathError(HoboError, ValueError):
    pass


class CapabilityError(HoboError, ValueError):
    pass


class NumericError(HoboError, ArithmeticError):
    pass


class StructureError(HoboError, ValueError):
    pass


class DecodeError(HoboError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("source locations are 1-based")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(HoboError, ValueError):
    """Raised for malformed problem sources; carries a location when known."""

    def __init__(self, message: str, location: SourceLocation | None = None):
        self.message = message
        self.location = location
        prefix = f"line {location.line}, column {location.column}: " if location else ""
        super().__init__(prefix + message)


class DomainError(HoboError, ValueError):
    pass
