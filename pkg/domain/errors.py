"""
Exception hierarchy for the QCS network simulator.

ConfigError maps to CLI exit code 2, every other QcsError to exit code 3.
"""
from __future__ import annotations

from typing import Optional


class QcsError(Exception):
    """Base class for all simulator errors"""


class ConfigError(QcsError):
    """Scenario file or command line could not be turned into a valid run"""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None) -> None:
        self.line = line
        self.source = source
        location = ""
        if source:
            location = f"{source}:"
        if line is not None:
            location = f"{location}{line}:"
        super().__init__(f"{location} {message}".strip() if location else message)


class SimulationError(QcsError):
    """A well-formed run hit a condition with no meaningful result"""


class NoPeakError(SimulationError):
    """Cross-correlation histogram has no distinguishable maximum"""


class EmptyShadowError(SimulationError):
    """Cut-off rate exceeds the best achievable rate, so the satellite casts no shadow"""


class GridMismatchError(SimulationError):
    """Two traces do not share a time grid or satellite index set"""
