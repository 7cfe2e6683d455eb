"""Exception hierarchy for the simulator"""

from typing import Optional, Tuple


class AmcSimError(Exception):
    """Base class for all simulator errors"""


class DimensionError(AmcSimError, ValueError):
    """Array shapes or sizes are inconsistent"""


class InputValidationError(AmcSimError, ValueError):
    """Input values are not usable (NaN, Inf, out of range)"""


class ZeroConductanceError(AmcSimError, ZeroDivisionError):
    """A device conductance is zero where its reciprocal is required"""

    def __init__(self, cell: Tuple[int, int], message: Optional[str] = None):
        self.cell = cell
        super().__init__(message or f"Conductance G{cell} is zero")


class AssemblyError(AmcSimError, IndexError):
    """Triplet index outside the system dimension"""


class SingularSystemError(AmcSimError):
    """Factorization hit a (numerically) zero pivot"""

    def __init__(self, message: str, pivot_index: Optional[int] = None):
        self.pivot_index = pivot_index
        if pivot_index is not None:
            message = f"{message} (pivot index {pivot_index})"
        super().__init__(message)


class DegenerateSolutionError(AmcSimError):
    """Solution exists but its read-out carries no information"""


class GenerationError(AmcSimError):
    """Random workload cannot satisfy the requested constraints"""


class BiasSearchError(AmcSimError):
    """Every trial of a bias candidate failed"""


class MatrixFileError(AmcSimError, ValueError):
    """Matrix or vector file is missing or malformed"""


class ConfigError(AmcSimError, ValueError):
    """Configuration file or option is invalid"""
