"""Exception hierarchy for orlicz-spectra."""

from pathlib import Path
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from orlicz_spectra.solver import Eigenpair


class OrliczSpectraError(Exception):
    """Base class for all package errors."""


class InputError(OrliczSpectraError, ValueError):
    """An argument violates an operation's precondition."""


class LevelError(InputError):
    """Requested minimax level exceeds the Galerkin dimension."""

    def __init__(self, level: int, dim: int) -> None:
        self.level = level
        self.dim = dim
        super().__init__(f"level exceeds dimension: i={level} > k={dim}")


class ConvergenceError(OrliczSpectraError):
    """An iteration stopped without meeting its tolerance."""

    def __init__(
        self,
        message: str,
        best: "Eigenpair | None" = None,
        diagnostics: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics or {}


class ConfigError(OrliczSpectraError):
    """Invalid run configuration, anchored to a file line when known."""

    def __init__(
        self,
        message: str,
        key: str | None = None,
        path: Path | None = None,
        line: int | None = None,
    ) -> None:
        self.message = message
        self.key = key
        self.path = path
        self.line = line
        super().__init__(self.anchored())

    def anchored(self) -> str:
        """Format as ``path:line: key: message``."""
        parts = []
        if self.path is not None:
            parts.append(f"{self.path}:{self.line}" if self.line is not None else str(self.path))
        if self.key:
            parts.append(self.key)
        parts.append(self.message)
        return ": ".join(parts)
