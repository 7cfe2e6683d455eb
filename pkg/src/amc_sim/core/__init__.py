"""Circuit description, structured operators and error types"""

from .exceptions import (
    AmcSimError,
    AssemblyError,
    BiasSearchError,
    ConfigError,
    DegenerateSolutionError,
    DimensionError,
    GenerationError,
    InputValidationError,
    MatrixFileError,
    SingularSystemError,
    ZeroConductanceError,
)
from .model import CrossbarModel
from .operators import (
    StructuredOperators,
    build_d,
    build_d1,
    build_selectors,
    operators_for,
    reshape,
    vec,
)

__all__ = [
    "AmcSimError",
    "AssemblyError",
    "BiasSearchError",
    "ConfigError",
    "CrossbarModel",
    "DegenerateSolutionError",
    "DimensionError",
    "GenerationError",
    "InputValidationError",
    "MatrixFileError",
    "SingularSystemError",
    "StructuredOperators",
    "ZeroConductanceError",
    "build_d",
    "build_d1",
    "build_selectors",
    "operators_for",
    "reshape",
    "vec",
]
