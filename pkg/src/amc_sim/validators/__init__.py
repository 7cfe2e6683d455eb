"""Input validators"""

from .matrix_validator import MatrixValidator

__all__ = ["MatrixValidator"]
