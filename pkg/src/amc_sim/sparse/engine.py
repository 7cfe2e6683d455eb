"""
Sparse engine.

Systems are assembled as triplets, compressed to CSC and factorized with
SuperLU (scipy.sparse.linalg.splu). SuperLU does not equilibrate, so the
factorization scales rows and columns to unit max-norm first and undoes the
scaling on solve.
"""

import logging
import re
import threading
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..core.exceptions import AssemblyError, DimensionError, SingularSystemError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, List[float], float]


class TripletBuffer:
    """Single-owner (row, col, value) accumulator for a dim x dim system"""

    def __init__(self, dim: int):
        if dim < 0:
            raise DimensionError(f"System dimension must be >= 0, got {dim}")
        self.dim = dim
        self._rows: List[np.ndarray] = []
        self._cols: List[np.ndarray] = []
        self._vals: List[np.ndarray] = []

    def add(self, row: int, col: int, value: float) -> None:
        self.add_many(np.array([row]), np.array([col]), np.array([value]))

    def add_many(self, rows: ArrayLike, cols: ArrayLike, values: ArrayLike) -> None:
        """Append a block of triplets; scalar values broadcast over the indices"""
        rows_a, cols_a, vals_a = np.broadcast_arrays(
            np.asarray(rows, dtype=np.int64),
            np.asarray(cols, dtype=np.int64),
            np.asarray(values, dtype=float),
        )
        self._rows.append(rows_a.ravel())
        self._cols.append(cols_a.ravel())
        self._vals.append(vals_a.ravel())

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self._rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0)
        return (
            np.concatenate(self._rows),
            np.concatenate(self._cols),
            np.concatenate(self._vals),
        )

    def __len__(self) -> int:
        return int(sum(r.size for r in self._rows))


@dataclass(frozen=True)
class SparseSystem:
    """Compressed (CSC) square system"""

    matrix: sp.csc_matrix

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    @property
    def sparsity(self) -> float:
        if self.dim == 0:
            return 1.0
        return 1.0 - self.nnz / float(self.dim) ** 2

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    @classmethod
    def from_matrix(cls, matrix: Union[np.ndarray, sp.spmatrix]) -> "SparseSystem":
        """Wrap a dense or scipy sparse square matrix (explicit zeros dropped)"""
        m = sp.csc_matrix(matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"System must be square, got shape {m.shape}")
        m.sum_duplicates()
        m.eliminate_zeros()
        return cls(matrix=m)


def compress(t: TripletBuffer) -> SparseSystem:
    """
    Sum duplicates and drop explicit zeros.

    Triplets are sorted by (row, col, value) first so the floating-point sum of
    duplicates does not depend on insertion order.

    Raises:
        AssemblyError: if any index falls outside [0, dim)
    """
    rows, cols, vals = t.arrays()
    dim = t.dim
    bad = (rows < 0) | (rows >= dim) | (cols < 0) | (cols >= dim)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise AssemblyError(
            f"Triplet ({rows[k]}, {cols[k]}) out of range for dimension {dim}"
        )
    order = np.lexsort((vals, cols, rows))
    coo = sp.coo_matrix((vals[order], (rows[order], cols[order])), shape=(dim, dim))
    matrix = coo.tocsc()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return SparseSystem(matrix=matrix)


def _equilibration(matrix: sp.csc_matrix) -> Tuple[np.ndarray, np.ndarray]:
    abs_m = abs(matrix)
    row_max = np.asarray(abs_m.max(axis=1).todense()).ravel()
    row_scale = np.where(row_max > 0, 1.0 / np.where(row_max > 0, row_max, 1.0), 1.0)
    scaled = sp.diags(row_scale) @ abs_m
    col_max = np.asarray(scaled.max(axis=0).todense()).ravel()
    col_scale = np.where(col_max > 0, 1.0 / np.where(col_max > 0, col_max, 1.0), 1.0)
    return row_scale, col_scale


@dataclass
class Factorization:
    """
    Reusable LU factorization of one SparseSystem.

    ``solve`` is safe to call from several threads.
    """

    system: SparseSystem
    lu: object
    row_scale: np.ndarray
    col_scale: np.ndarray
    factor_seconds: float
    permc_spec: str
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def dim(self) -> int:
        return self.system.dim

    @property
    def fill_in(self) -> int:
        """nnz(L) + nnz(U)"""
        return int(self.lu.L.nnz + self.lu.U.nnz)

    @property
    def fill_ratio(self) -> float:
        return self.fill_in / max(self.system.nnz, 1)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.dim or rhs.ndim > 2:
            raise DimensionError(
                f"Right-hand side has shape {rhs.shape}, system dimension is {self.dim}"
            )
        if self.dim == 0:
            return rhs.copy()
        scaled = rhs * self.row_scale[:, None] if rhs.ndim == 2 else rhs * self.row_scale
        with self._lock:
            y = self.lu.solve(scaled)
        return y * self.col_scale[:, None] if y.ndim == 2 else y * self.col_scale

    def relative_residual(self, x: np.ndarray, rhs: np.ndarray) -> float:
        """||Ax - b|| / (||A|| ||x|| + ||b||), infinity norms"""
        a = self.system.matrix
        r = a @ x - rhs
        a_norm = float(abs(a).sum(axis=1).max()) if a.nnz else 0.0
        denom = a_norm * float(np.max(np.abs(x), initial=0.0)) + float(
            np.max(np.abs(rhs), initial=0.0)
        )
        num = float(np.max(np.abs(r), initial=0.0))
        return num / denom if denom > 0 else num


def _pivot_from_message(message: str) -> Optional[int]:
    match = re.search(r"(\d+)", message)
    return int(match.group(1)) if match else None


def factorize(
    a: SparseSystem,
    permc_spec: str = "COLAMD",
    equilibrate: bool = True,
    pivot_rtol: float = 1e-15,
) -> Factorization:
    """
    LU-factorize ``a`` with partial pivoting.

    Args:
        a: Square compressed system
        permc_spec: SuperLU column ordering (COLAMD, MMD_AT_PLUS_A, MMD_ATA, NATURAL)
        equilibrate: Scale rows and columns to unit max-norm before factorizing
        pivot_rtol: Reject factors whose smallest |U_kk| is below this fraction of the largest

    Raises:
        SingularSystemError: structurally or numerically singular matrix
    """
    matrix = a.matrix
    dim = a.dim
    if dim == 0:
        return Factorization(a, None, np.ones(0), np.ones(0), 0.0, permc_spec)

    if equilibrate:
        row_scale, col_scale = _equilibration(matrix)
        scaled = (sp.diags(row_scale) @ matrix @ sp.diags(col_scale)).tocsc()
    else:
        row_scale, col_scale = np.ones(dim), np.ones(dim)
        scaled = matrix

    start = time.perf_counter()
    try:
        lu = splu(scaled, permc_spec=permc_spec)
    except RuntimeError as e:
        raise SingularSystemError(
            f"Factorization failed: {e}", pivot_index=_pivot_from_message(str(e))
        ) from e
    elapsed = time.perf_counter() - start

    u_diag = np.abs(lu.U.diagonal())
    largest = float(u_diag.max(initial=0.0))
    k = int(np.argmin(u_diag))
    if largest == 0.0 or u_diag[k] <= pivot_rtol * largest:
        column = int(np.flatnonzero(lu.perm_c == k)[0])
        raise SingularSystemError(
            f"Numerically singular system: |U_kk| = {u_diag[k]:.3e}, max {largest:.3e}",
            pivot_index=column,
        )

    logger.debug(
        f"Factorized dim={dim} nnz={a.nnz} fill={lu.L.nnz + lu.U.nnz} in {elapsed * 1e3:.2f} ms"
    )
    return Factorization(a, lu, row_scale, col_scale, elapsed, permc_spec)


def solve(f: Factorization, rhs: np.ndarray) -> np.ndarray:
    """Forward/backward substitution against an existing factorization"""
    return f.solve(rhs)


def sparsity_report(a: SparseSystem) -> Tuple[int, float]:
    """(nnz, 1 - nnz / dim^2)"""
    return a.nnz, a.sparsity
