"""
Exception hierarchy for the fourcycle counting engines.

Every error raised by the library derives from FourCycleError so the CLI can map
failures to exit codes in one place.
"""

from typing import Optional


class FourCycleError(Exception):
    """Base class for all library errors."""


class GraphError(FourCycleError):
    """Invalid update against the current graph."""


class DuplicateInsert(GraphError):
    """Insert of an edge that is already present."""


class MissingDelete(GraphError):
    """Delete of an edge that is not present."""


class LayerMismatch(GraphError):
    """Vertex layer does not match the matrix or query position."""


class SelfLoop(GraphError):
    """General-graph update with identical endpoints."""


class MatmulError(FourCycleError):
    """Matrix product failure."""


class DimensionMismatch(MatmulError):
    """Operands declared over incompatible index universes."""


class OverflowDetected(MatmulError):
    """A product could exceed the signed 64-bit entry range."""


class DeadlineMissed(FourCycleError):
    """Deferred work was not finished by its deadline."""

    def __init__(self, message: str, owner: Optional[str] = None):
        super().__init__(message)
        self.owner = owner


class ParamsError(FourCycleError):
    """Parameter or threshold problem."""


class Infeasible(ParamsError):
    """No parameter set on the grid satisfies every constraint."""


class BootstrapRange(ParamsError):
    """Reference edge count too small for strictly ordered thresholds."""


class InvalidParam(ParamsError):
    """A user supplied value is out of range."""


class RebuildRequired(FourCycleError):
    """Edge count drifted outside the frozen thresholds' validity window."""


class WarmupViolation(FourCycleError):
    """A/C update arrived after the warm-up engine froze A and C."""


class ParseError(FourCycleError):
    """Malformed update stream line."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
