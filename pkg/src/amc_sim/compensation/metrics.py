"""Relative-error metrics for raw (INV/MVM) and normalized (EGV) outputs"""

import numpy as np

from ..core.exceptions import DegenerateSolutionError


def re_inv(x: np.ndarray, x_ideal: np.ndarray) -> float:
    """||x - x_ideal|| / ||x_ideal||"""
    x, x_ideal = np.asarray(x, dtype=float), np.asarray(x_ideal, dtype=float)
    denom = float(np.linalg.norm(x_ideal))
    if denom == 0.0:
        raise ZeroDivisionError("Ideal vector has zero norm")
    return float(np.linalg.norm(x - x_ideal)) / denom


def re_egv(x: np.ndarray, x_ideal: np.ndarray) -> float:
    """Distance between unit-normalized vectors, x flipped when it opposes x_ideal"""
    x, x_ideal = np.asarray(x, dtype=float), np.asarray(x_ideal, dtype=float)
    nx, ni = float(np.linalg.norm(x)), float(np.linalg.norm(x_ideal))
    if nx == 0.0 or ni == 0.0:
        raise DegenerateSolutionError("Eigenvector error needs two nonzero vectors")
    x, x_ideal = x / nx, x_ideal / ni
    if float(x @ x_ideal) < 0:
        x = -x
    return float(np.linalg.norm(x - x_ideal))


re_mvm = re_inv


def delta_re(baseline: float, minimum: float) -> float:
    """Relative reduction (baseline - minimum) / baseline"""
    if baseline == 0:
        raise ZeroDivisionError("Baseline relative error is zero")
    return (baseline - minimum) / baseline
