"""Validator for conductance matrices and input vectors loaded from files"""

import logging
from typing import List, Optional, Tuple

import numpy as np


class MatrixValidator:
    """Validate a conductance matrix before it is mapped onto a crossbar"""

    def __init__(
        self,
        g_min: float = 1e-5,
        g_max: float = 1e-4,
        require_symmetric: bool = False,
        logger: Optional[logging.Logger] = None
    ):
        """
        Initialize MatrixValidator.

        Args:
            g_min: Lower edge of the device conductance window (S)
            g_max: Upper edge of the device conductance window (S)
            require_symmetric: Treat asymmetry as an error instead of a warning
            logger: Logger instance
        """
        self.g_min = g_min
        self.g_max = g_max
        self.require_symmetric = require_symmetric
        self.logger = logger or logging.getLogger(__name__)
        self.validation_errors: List[str] = []
        self.warnings: List[str] = []

    def validate(self, matrix: np.ndarray) -> bool:
        """
        Validate a conductance matrix.

        Errors (invalid): not square, smaller than 2 x 2, NaN/Inf, any
        entry <= 0. Warnings (still valid): entries outside
        [g_min, g_max], asymmetry.

        Returns:
            True if the matrix can be simulated, False otherwise
        """
        self.validation_errors.clear()
        self.warnings.clear()

        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            self._error(f"Matrix must be square, got shape {matrix.shape}")
            return False
        if matrix.shape[0] < 2:
            self._error("Matrix must be at least 2 x 2")
            return False
        if not np.all(np.isfinite(matrix)):
            self._error("Matrix contains NaN or Inf")
            return False

        non_positive = np.argwhere(matrix <= 0)
        if non_positive.size:
            i, j = non_positive[0]
            self._error(
                f"{len(non_positive)} non-positive conductances, first at ({i}, {j}) = {matrix[i, j]}"
            )
            return False

        self._check_window(matrix)
        if not np.allclose(matrix, matrix.T, rtol=1e-9, atol=0.0):
            message = "Matrix is not symmetric"
            if self.require_symmetric:
                self._error(message)
                return False
            self._warn(message)

        return True

    def validate_vector(self, vector: np.ndarray, n: int) -> bool:
        """Length-n finite vector"""
        self.validation_errors.clear()
        vector = np.asarray(vector, dtype=float)
        if vector.ndim != 1 or vector.size != n:
            self._error(f"Vector must have length {n}, got shape {vector.shape}")
            return False
        if not np.all(np.isfinite(vector)):
            self._error("Vector contains NaN or Inf")
            return False
        return True

    def _check_window(self, matrix: np.ndarray) -> None:
        outside = (matrix < self.g_min) | (matrix > self.g_max)
        if np.any(outside):
            self._warn(
                f"{int(outside.sum())} conductances outside [{self.g_min:.3g}, {self.g_max:.3g}] S"
            )

    def _error(self, message: str) -> None:
        self.validation_errors.append(message)
        self.logger.error(f"Matrix validation failed: {message}")

    def _warn(self, message: str) -> None:
        self.warnings.append(message)
        self.logger.warning(message)

    def get_validation_errors(self) -> List[str]:
        """Get list of validation errors from the last validation"""
        return self.validation_errors.copy()

    def get_report(self) -> Tuple[List[str], List[str]]:
        """(errors, warnings) from the last validation"""
        return self.validation_errors.copy(), self.warnings.copy()
