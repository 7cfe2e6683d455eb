"""Closed-form references for the ideal (wire-free) circuits"""

from typing import Any, Tuple

import numpy as np

from ..core.exceptions import DegenerateSolutionError, DimensionError, SingularSystemError


def _square(a: Any) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {a.shape}")
    return a


def align_and_normalize(x: np.ndarray) -> np.ndarray:
    """
    Unit-norm copy of x with a fixed sign: sum(x) >= 0, ties broken by the
    largest-magnitude entry being positive.
    """
    x = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(x))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateSolutionError("Cannot normalize a zero or non-finite vector")
    total = float(np.sum(x))
    if total < 0 or (total == 0 and x[np.argmax(np.abs(x))] < 0):
        x = -x
    return x / norm


def ideal_inv(a: Any, b: Any) -> np.ndarray:
    """x = A^-1 b"""
    a = _square(a)
    b = np.asarray(b, dtype=float)
    if b.shape != (a.shape[0],):
        raise DimensionError(f"b has shape {b.shape}, expected ({a.shape[0]},)")
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(f"Ideal INV reference is singular: {e}") from e


def ideal_egv(a: Any) -> Tuple[float, np.ndarray]:
    """Dominant eigenpair (largest real eigenvalue) with a sign-aligned unit eigenvector"""
    a = _square(a)
    if np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        values, vectors = np.linalg.eigh(a)
        k = int(np.argmax(values))
        return float(values[k]), align_and_normalize(vectors[:, k])
    values, vectors = np.linalg.eig(a)
    k = int(np.argmax(values.real))
    return float(values[k].real), align_and_normalize(vectors[:, k].real)


def ideal_mvm(a: Any, v: Any) -> np.ndarray:
    """i = A^T v (rows driven, columns sensed)"""
    a = _square(a)
    v = np.asarray(v, dtype=float)
    if v.shape != (a.shape[0],):
        raise DimensionError(f"v has shape {v.shape}, expected ({a.shape[0]},)")
    return a.T @ v
