"""Triplet assembly, compressed storage and direct LU factorization"""

from .engine import (
    Factorization,
    SparseSystem,
    TripletBuffer,
    compress,
    factorize,
    solve,
    sparsity_report,
)

__all__ = [
    "Factorization",
    "SparseSystem",
    "TripletBuffer",
    "compress",
    "factorize",
    "solve",
    "sparsity_report",
]
