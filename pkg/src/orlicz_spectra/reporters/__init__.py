"""Reporters package."""

from orlicz_spectra.reporters.json_formats import (
    JUnitReporter,
    SolveReporter,
    SweepReporter,
    ValidationReporter,
    atomic_write_text,
)
from orlicz_spectra.reporters.terminal import TerminalReporter

__all__ = [
    "JUnitReporter",
    "SolveReporter",
    "SweepReporter",
    "TerminalReporter",
    "ValidationReporter",
    "atomic_write_text",
]
