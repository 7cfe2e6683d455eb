"""Error categories shared by sweep rows and CLI exit codes"""

import asyncio
from enum import Enum

from pydantic import ValidationError

from ..core.exceptions import (
    ConfigError,
    GenerationError,
    InputValidationError,
    MatrixFileError,
    SingularSystemError,
    ZeroConductanceError,
)


class ErrorCategory(Enum):
    """Categories for simulation failures"""
    VALIDATION_ERROR = "validation_error"
    SINGULAR_SYSTEM = "singular_system"
    TIMEOUT_ERROR = "timeout_error"
    INTERNAL_ERROR = "internal_error"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    ErrorCategory.VALIDATION_ERROR: 2,
    ErrorCategory.SINGULAR_SYSTEM: 3,
    ErrorCategory.TIMEOUT_ERROR: 1,
    ErrorCategory.INTERNAL_ERROR: 1,
}


def categorize_error(error: BaseException) -> ErrorCategory:
    """Map an exception onto an ErrorCategory"""
    if isinstance(error, SingularSystemError):
        return ErrorCategory.SINGULAR_SYSTEM
    if isinstance(error, (asyncio.TimeoutError, TimeoutError)):
        return ErrorCategory.TIMEOUT_ERROR
    if isinstance(
        error,
        (
            ValidationError,
            InputValidationError,
            MatrixFileError,
            ConfigError,
            GenerationError,
            ZeroConductanceError,
            FileNotFoundError,
            ValueError,
        ),
    ):
        return ErrorCategory.VALIDATION_ERROR
    return ErrorCategory.INTERNAL_ERROR
