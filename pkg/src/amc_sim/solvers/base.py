"""Shared factor-and-solve loop for the crossbar solvers"""

import logging
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, ClassVar, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..core.exceptions import DimensionError, InputValidationError
from ..core.model import CrossbarModel
from ..core.operators import reshape, vec
from ..sparse import Factorization, SparseSystem, factorize


class SolverSettings(BaseModel):
    """Numerical settings shared by all solvers (``solver`` config section)"""

    residual_tol: float = Field(1e-9, gt=0)
    max_newton_steps: int = Field(2, ge=1)
    step_rtol: float = Field(1e-12, ge=0)
    permc_spec: str = Field("COLAMD", pattern="^(COLAMD|NATURAL|MMD_ATA|MMD_AT_PLUS_A)$")
    equilibrate: bool = True
    pivot_rtol: float = Field(1e-15, ge=0)

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]]) -> "SolverSettings":
        return cls(**(config or {}))


@dataclass(frozen=True)
class Diagnostics:
    """Sparsity and timing of one solve (milliseconds)"""

    nnz: int
    sparsity: float
    fill_in: int
    assembly_ms: float
    factor_ms: float
    solve_ms: float
    newton_steps: int
    last_step: float
    converged: bool
    factorization_reused: bool

    @property
    def total_ms(self) -> float:
        return self.assembly_ms + self.factor_ms + self.solve_ms


def as_vector(values: Any, n: int, name: str) -> np.ndarray:
    """Finite float vector of length n"""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size != n:
        raise DimensionError(f"{name} must have length {n}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputValidationError(f"{name} contains NaN or Inf")
    return v


class CrossbarSolver(ABC):
    """
    Base for the INV, EGV and MVM solvers.

    The Jacobian of every circuit is constant, so it is assembled and
    factorized once per solver instance and reused for every input.
    """

    circuit: ClassVar[str] = ""

    def __init__(
        self,
        model: CrossbarModel,
        settings: Optional[SolverSettings] = None,
        logger: Optional[logging.Logger] = None
    ):
        self.model = model
        self.n = model.n
        self.settings = settings or SolverSettings()
        self.logger = logger or logging.getLogger(__name__)
        self._jacobian: Optional[SparseSystem] = None
        self._factorization: Optional[Factorization] = None
        self._assembly_seconds = 0.0
        self._lock = threading.Lock()

    @abstractmethod
    def _assemble(self) -> SparseSystem:
        """Stamp the constant Jacobian"""

    @property
    def jacobian(self) -> SparseSystem:
        with self._lock:
            if self._jacobian is None:
                start = time.perf_counter()
                self._jacobian = self._assemble()
                self._assembly_seconds = time.perf_counter() - start
                self.logger.debug(
                    f"{self.circuit} N={self.n}: assembled nnz={self._jacobian.nnz} "
                    f"in {self._assembly_seconds * 1e3:.2f} ms"
                )
            return self._jacobian

    @property
    def factorization(self) -> Factorization:
        jacobian = self.jacobian
        with self._lock:
            if self._factorization is None:
                self._factorization = factorize(
                    jacobian,
                    permc_spec=self.settings.permc_spec,
                    equilibrate=self.settings.equilibrate,
                    pivot_rtol=self.settings.pivot_rtol,
                )
            return self._factorization

    def _newton(
        self,
        residual: Callable[[np.ndarray], np.ndarray],
        scale: float
    ) -> Tuple[np.ndarray, float, Diagnostics]:
        """
        Solve F(X) = 0 from X = 0.

        F is affine, so the first step lands on the solution up to the LU
        rounding error and the second step is an iterative-refinement
        correction against the same factors. The refinement step is always
        taken (unless ``max_newton_steps`` is 1); later steps run only while
        the last step moved X by more than ``step_rtol`` relative.
        """
        reused = self._factorization is not None
        fact = self.factorization
        tol = self.settings.residual_tol * scale

        x = np.zeros((self.n, self.n))
        f = residual(x)
        norm = float(np.max(np.abs(f)))
        steps = 0
        step_size = 0.0
        start = time.perf_counter()
        while steps < self.settings.max_newton_steps:
            delta = reshape(fact.solve(-vec(f)), self.n)
            x = x + delta
            f = residual(x)
            norm = float(np.max(np.abs(f)))
            steps += 1
            x_norm = float(np.linalg.norm(x))
            step_size = float(np.linalg.norm(delta)) / x_norm if x_norm > 0 else 0.0
            if x_norm == 0.0 or (steps > 1 and step_size <= self.settings.step_rtol):
                break
        solve_seconds = time.perf_counter() - start

        converged = norm <= tol
        if not converged:
            self.logger.warning(
                f"{self.circuit} N={self.n}: residual {norm:.3e} above tolerance {tol:.3e} "
                f"after {steps} Newton steps"
            )

        diagnostics = Diagnostics(
            nnz=fact.system.nnz,
            sparsity=fact.system.sparsity,
            fill_in=fact.fill_in,
            assembly_ms=self._assembly_seconds * 1e3,
            factor_ms=fact.factor_seconds * 1e3,
            solve_ms=solve_seconds * 1e3,
            newton_steps=steps,
            last_step=step_size,
            converged=converged,
            factorization_reused=reused,
        )
        return x, norm, diagnostics
