from __future__ import annotations

from typing import Any


class CarryError(Exception):
    """Base class of the package errors. `source` is the object that failed, if any"""

    __slots__ = ("source",)

    def __init__(self, message: str = "", *, source: Any = None):
        if source is not None:
            message = f"{message} [{type(source).__name__}]"
        super().__init__(message)
        self.source = source


class InitializationError(CarryError):
    pass


class AlphabetMismatchError(CarryError):
    pass


class NotInLanguageError(CarryError):
    pass


class InvalidSignatureError(CarryError):
    __slots__ = ("index",)

    def __init__(self, message: str = "", *, index: int | None = None, **kwargs):
        super().__init__(message, **kwargs)
        self.index = index


class EmptyLanguageError(CarryError):
    pass


class PrecisionError(CarryError):
    pass


class BudgetExceededError(CarryError):
    pass


class UnknownSystemError(CarryError):
    pass


class ParseError(CarryError):
    __slots__ = ("filename", "line")

    def __init__(
        self,
        message: str = "",
        *,
        filename: str | None = None,
        line: int | None = None,
        **kwargs,
    ):
        location = filename or "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}", **kwargs)
        self.filename = filename
        self.line = line
