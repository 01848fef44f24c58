"""Exception types shared across the package."""


class QCError(Exception):
    """Base class for all package errors."""


class InputError(QCError, ValueError):
    """An argument violates an operation's precondition."""


class DomainError(QCError, ValueError):
    """An evaluation point or integration region leaves the field's domain."""


class FieldSpecError(InputError):
    """Malformed field-spec string; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class GridFormatError(InputError):
    """Malformed CSV lattice; ``row`` is the 1-based data row (0 for the header)."""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class UnsupportedMapError(QCError, NotImplementedError):
    """The requested verification is not available for this map."""


class Refusal(QCError):
    """A pipeline refused to issue a result because a hypothesis failed.

    ``report`` carries the evidence (a ConditionReport, a bound table, ...).
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class DegenerateFitError(QCError, ValueError):
    """A log-log fit met a zero displacement."""
