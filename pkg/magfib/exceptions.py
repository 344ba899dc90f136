"""Error types raised across magfib."""

from __future__ import annotations

from typing import Any, Optional

__all__ = (
    "ChainComplexError",
    "ChainMapError",
    "DeltaSetError",
    "EnumerationLimitError",
    "FibrationError",
    "InputError",
    "MagfibError",
    "MetricError",
    "MorseError",
    "WordError",
)


class MagfibError(Exception):
    """Base class for every error raised by the package."""


class InputError(MagfibError, ValueError):
    """Malformed input files, unknown fixtures or labels."""


class MetricError(InputError):
    """A graph or matrix that cannot be turned into a finite metric space."""


class FibrationError(MagfibError):
    def __init__(self, message: str, failure: Optional[Any] = None) -> None:
        super().__init__(message)
        self.failure = failure


class WordError(MagfibError, ValueError):
    """Bad input to the h/v/t word calculus."""


class ChainComplexError(MagfibError):
    def __init__(self, message: str, degree: Optional[int] = None, generator: Any = None) -> None:
        super().__init__(message)
        self.degree = degree
        self.generator = generator


class ChainMapError(ChainComplexError):
    pass


class MorseError(MagfibError):
    pass


class DeltaSetError(MagfibError):
    def __init__(self, message: str, witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness


class EnumerationLimitError(MagfibError):
    pass
