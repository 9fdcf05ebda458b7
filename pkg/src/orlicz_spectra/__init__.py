"""Orlicz Spectra - Galerkin eigensolver for the fractional m-Laplacian."""

__version__ = "0.1.0"

from orlicz_spectra.errors import (
    ConfigError,
    ConvergenceError,
    InputError,
    LevelError,
    OrliczSpectraError,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "InputError",
    "LevelError",
    "OrliczSpectraError",
    "__version__",
]
