"""
Index-level Jacobian stamping.

Each residual term of the form A(X), X B, A[W o (X B)] or an explicit
entry list is differentiated entry-wise and appended as triplets, so that
vec(F(X) - F(0)) = J vec(X) under row-major vec. ``src_cols`` restricts the
source X to a subset of its columns (X M with M a diagonal selector).
"""

from typing import Optional, Tuple

import numpy as np

from ..sparse import SparseSystem, TripletBuffer, compress


def _nonzeros(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols = np.nonzero(a)
    return rows, cols, a[rows, cols]


class JacobianStamper:
    """Accumulates the linear part of an N x N residual into an N^2 x N^2 system"""

    def __init__(self, n: int):
        self.n = n
        self.buffer = TripletBuffer(n * n)
        self._all = np.arange(n)

    def _columns(self, src_cols: Optional[np.ndarray]) -> np.ndarray:
        return self._all if src_cols is None else self._all[np.asarray(src_cols, dtype=bool)]

    def left(self, a: np.ndarray, coef: float = 1.0, src_cols: Optional[np.ndarray] = None) -> None:
        """coef * A (X M): row (i, j) <- X(k, j) with A_ik"""
        n = self.n
        ia, ka, va = _nonzeros(a)
        js = self._columns(src_cols)
        rows = ia[:, None] * n + js[None, :]
        cols = ka[:, None] * n + js[None, :]
        self.buffer.add_many(rows, cols, coef * va[:, None])

    def right(self, b: np.ndarray, coef: float = 1.0, src_cols: Optional[np.ndarray] = None) -> None:
        """coef * (X M) B: row (i, j) <- X(i, k) with B_kj"""
        n = self.n
        kb, jb, vb = _nonzeros(b)
        if src_cols is not None:
            keep = np.asarray(src_cols, dtype=bool)[kb]
            kb, jb, vb = kb[keep], jb[keep], vb[keep]
        i = self._all[:, None]
        self.buffer.add_many(i * n + jb[None, :], i * n + kb[None, :], coef * vb[None, :])

    def sandwich(
        self,
        a: np.ndarray,
        w: np.ndarray,
        b: np.ndarray,
        coef: float = 1.0,
        src_cols: Optional[np.ndarray] = None,
    ) -> None:
        """coef * A [W o ((X M) B)]: row (i, j) <- X(m, k) with A_im W_mj B_kj"""
        n = self.n
        ia, ma, va = _nonzeros(a)
        kb, jb, vb = _nonzeros(b)
        if src_cols is not None:
            keep = np.asarray(src_cols, dtype=bool)[kb]
            kb, jb, vb = kb[keep], jb[keep], vb[keep]
        rows = ia[:, None] * n + jb[None, :]
        cols = ma[:, None] * n + kb[None, :]
        vals = coef * va[:, None] * w[ma[:, None], jb[None, :]] * vb[None, :]
        self.buffer.add_many(rows, cols, vals)

    def entries(
        self,
        dst: Tuple[np.ndarray, np.ndarray],
        src: Tuple[np.ndarray, np.ndarray],
        values: np.ndarray,
    ) -> None:
        """Explicit d F(dst) / d X(src) entries"""
        n = self.n
        self.buffer.add_many(
            np.asarray(dst[0]) * n + np.asarray(dst[1]),
            np.asarray(src[0]) * n + np.asarray(src[1]),
            values,
        )

    def compress(self) -> SparseSystem:
        return compress(self.buffer)
