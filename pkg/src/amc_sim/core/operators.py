"""Constant structured operators (D, D1, M1..M5) and the row-major vec convention"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .exceptions import DimensionError


def _tridiagonal(diagonal: np.ndarray) -> np.ndarray:
    n = diagonal.size
    op = np.diag(diagonal.astype(float))
    if n > 1:
        idx = np.arange(n - 1)
        op[idx, idx + 1] = -1.0
        op[idx + 1, idx] = -1.0
    return op


def build_d(n: int) -> np.ndarray:
    """Tridiagonal D: diagonal (1, 2, ..., 2), off-diagonals -1; D @ 1 = e_N"""
    if n < 1:
        raise DimensionError(f"Operator dimension must be >= 1, got {n}")
    diagonal = np.full(n, 2.0)
    diagonal[0] = 1.0
    return _tridiagonal(diagonal)


def build_d1(n: int) -> np.ndarray:
    """Tridiagonal D1: diagonal (2, ..., 2, 1), off-diagonals -1; D1 @ 1 = e_1"""
    if n < 1:
        raise DimensionError(f"Operator dimension must be >= 1, got {n}")
    diagonal = np.full(n, 2.0)
    diagonal[-1] = 1.0
    return _tridiagonal(diagonal)


def build_selectors(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Selector matrices (M1, M2, M3, M4, M5).

    M1 = diag(1..1, 0), M2 = diag(0..0, 1), M3 = single 1 at (N, 1),
    M4 = diag(0, 1..1), M5 = diag(0..0, 1).
    """
    if n < 2:
        raise DimensionError(f"Selectors need n >= 2, got {n}")
    m1 = np.eye(n)
    m1[-1, -1] = 0.0
    m2 = np.zeros((n, n))
    m2[-1, -1] = 1.0
    m3 = np.zeros((n, n))
    m3[-1, 0] = 1.0
    m4 = np.eye(n)
    m4[0, 0] = 0.0
    m5 = m2.copy()
    return m1, m2, m3, m4, m5


def vec(x: np.ndarray) -> np.ndarray:
    """Row-major flattening of an N x N matrix"""
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"vec expects a square matrix, got shape {x.shape}")
    return x.reshape(-1).copy()


def reshape(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of vec"""
    v = np.asarray(v)
    if v.ndim != 1 or v.size != n * n:
        raise DimensionError(f"Cannot reshape vector of shape {v.shape} to ({n}, {n})")
    return v.reshape(n, n).copy()


@dataclass(frozen=True)
class StructuredOperators:
    """All constant operators for one dimension"""

    n: int
    d: np.ndarray
    d1: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    m4: np.ndarray
    m5: np.ndarray

    @classmethod
    def build(cls, n: int) -> "StructuredOperators":
        m1, m2, m3, m4, m5 = build_selectors(n)
        ops = cls(n=n, d=build_d(n), d1=build_d1(n), m1=m1, m2=m2, m3=m3, m4=m4, m5=m5)
        for array in (ops.d, ops.d1, m1, m2, m3, m4, m5):
            array.setflags(write=False)
        return ops


@lru_cache(maxsize=32)
def operators_for(n: int) -> StructuredOperators:
    """Cached StructuredOperators.build"""
    return StructuredOperators.build(n)
