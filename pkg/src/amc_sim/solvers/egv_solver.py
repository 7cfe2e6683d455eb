"""Eigenvector (EGV) circuit with interconnect resistance"""

import logging
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import (
    DegenerateSolutionError,
    DimensionError,
    InputValidationError,
    SingularSystemError,
)
from ..core.model import CrossbarModel, reciprocal_conductance
from ..core.operators import operators_for
from ..oracle.ideal import align_and_normalize, ideal_egv
from ..sparse import SparseSystem, factorize
from .base import CrossbarSolver, Diagnostics, SolverSettings
from .stamping import JacobianStamper


class EgvProblem(BaseModel):
    """
    Crossbar, feedback conductance G_lambda (S) and drive voltage V0 (V).

    V0 = 0 is accepted here (the residual is still defined) but has no
    eigenvector read-out; solve_egv rejects it.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: CrossbarModel
    g_lambda: float = Field(..., gt=0)
    v0: float = Field(0.1, allow_inf_nan=False)

    @classmethod
    def at_dominant_eigenvalue(cls, model: CrossbarModel, v0: float = 0.1) -> "EgvProblem":
        """G_lambda = lambda_max(G)"""
        lam, _ = ideal_egv(model.g)
        return cls(model=model, g_lambda=lam, v0=v0)


@dataclass(frozen=True)
class EgvSolution:
    x_hat: np.ndarray
    raw: np.ndarray
    v_field: np.ndarray
    residual_norm: float
    rayleigh_quotient: float
    rayleigh_defect: float
    diagnostics: Diagnostics


def drive_matrix(n: int, v0: float) -> np.ndarray:
    """V0 M3: the drive at entry (N-1, 0)"""
    drive = np.zeros((n, n))
    drive[-1, 0] = v0
    return drive


def residual_egv(v: np.ndarray, problem: EgvProblem) -> np.ndarray:
    """
    F(V) = g1 D[(1/G) o V D] + (g1/g2) V D + D V - (g1/G_lambda) (V M5)^T M4 - V0 M3
    """
    model = problem.model
    n = model.n
    if v.shape != (n, n):
        raise DimensionError(f"V must be ({n}, {n}), got {v.shape}")
    inv_g = reciprocal_conductance(model.g)
    ops = operators_for(n)
    g1, g2 = model.g1, model.g2
    vd = v @ ops.d
    return (
        g1 * (ops.d @ (inv_g * vd))
        + (g1 / g2) * vd
        + ops.d @ v
        - (g1 / problem.g_lambda) * ((v @ ops.m5).T @ ops.m4)
        - drive_matrix(n, problem.v0)
    )


def _stamp_network(model: CrossbarModel) -> JacobianStamper:
    ops = operators_for(model.n)
    stamper = JacobianStamper(model.n)
    stamper.sandwich(ops.d, reciprocal_conductance(model.g), ops.d, model.g1)
    stamper.right(ops.d, model.g1 / model.g2)
    stamper.left(ops.d, 1.0)
    return stamper


def _feedback_indices(n: int):
    j = np.arange(1, n)
    return (np.full(n - 1, n - 1), j), (j, np.full(n - 1, n - 1))


def jacobian_egv(problem: EgvProblem) -> SparseSystem:
    """Constant J with vec(F(V) - F(0)) = J vec(V)"""
    model = problem.model
    stamper = _stamp_network(model)
    # (V M5)^T M4: F(N-1, j) <- V(j, N-1) for j >= 1
    dst, src = _feedback_indices(model.n)
    stamper.entries(dst, src, np.full(model.n - 1, -model.g1 / problem.g_lambda))
    return stamper.compress()


def _readout(v_last: np.ndarray, g1: float, g_lambda: float) -> np.ndarray:
    return (g1 / g_lambda) * v_last


def _rayleigh(g: np.ndarray, x_hat: np.ndarray):
    quotient = float(x_hat @ g @ x_hat)
    defect = float(np.linalg.norm(g @ x_hat - quotient * x_hat))
    return quotient, defect


class EgvSolver(CrossbarSolver):
    """EGV circuit bound to one crossbar and one G_lambda"""

    circuit = "egv"

    def __init__(
        self,
        model: CrossbarModel,
        g_lambda: float,
        settings: Optional[SolverSettings] = None,
        logger: Optional[logging.Logger] = None
    ):
        super().__init__(model, settings, logger)
        self.g_lambda = float(g_lambda)
        self._problem = EgvProblem(model=model, g_lambda=self.g_lambda, v0=1.0)

    def _assemble(self) -> SparseSystem:
        return jacobian_egv(self._problem)

    def solve(self, v0: float = 0.1) -> EgvSolution:
        """
        Raises:
            DegenerateSolutionError: V0 = 0 or an all-zero read-out
        """
        problem = EgvProblem(model=self.model, g_lambda=self.g_lambda, v0=v0)
        if problem.v0 == 0:
            raise DegenerateSolutionError("V0 = 0 drives nothing; the read-out is identically zero")
        scale = max(1.0, abs(problem.v0))
        v, norm, diagnostics = self._newton(lambda x: residual_egv(x, problem), scale)
        raw = _readout(v[:, -1], self.model.g1, self.g_lambda)
        x_hat = align_and_normalize(raw)
        quotient, defect = _rayleigh(self.model.g, x_hat)
        return EgvSolution(
            x_hat=x_hat,
            raw=raw,
            v_field=v,
            residual_norm=norm,
            rayleigh_quotient=quotient,
            rayleigh_defect=defect,
            diagnostics=diagnostics,
        )


def solve_egv(
    problem: EgvProblem,
    settings: Optional[SolverSettings] = None,
    logger: Optional[logging.Logger] = None
) -> EgvSolution:
    """One factor-and-solve of the EGV circuit"""
    return EgvSolver(problem.model, problem.g_lambda, settings, logger).solve(problem.v0)


class FeedbackFamily:
    """
    EGV read-out as a function of G_lambda for a fixed crossbar and drive.

    The G_lambda term touches N-1 Jacobian entries, J = J0 - c U V^T with
    c = g1 / G_lambda, so J0 is factorized once and each G_lambda costs one
    (N-1) x (N-1) dense solve.
    """

    def __init__(
        self,
        model: CrossbarModel,
        v0: float = 0.1,
        settings: Optional[SolverSettings] = None,
        logger: Optional[logging.Logger] = None,
        block_size: int = 64
    ):
        if v0 == 0:
            raise DegenerateSolutionError("V0 = 0 drives nothing; the read-out is identically zero")
        self.model = model
        self.v0 = float(v0)
        self.settings = settings or SolverSettings()
        self.logger = logger or logging.getLogger(__name__)

        n = model.n
        start = time.perf_counter()
        base = factorize(
            _stamp_network(model).compress(),
            permc_spec=self.settings.permc_spec,
            equilibrate=self.settings.equilibrate,
            pivot_rtol=self.settings.pivot_rtol,
        )
        out_idx = np.arange(n) * n + (n - 1)
        rhs = np.zeros(n * n)
        rhs[(n - 1) * n] = self.v0
        self._y0 = base.solve(rhs)[out_idx]

        feedback_rows = (n - 1) * n + np.arange(1, n)
        self._z = np.empty((n, n - 1))
        for lo in range(0, n - 1, block_size):
            hi = min(lo + block_size, n - 1)
            block = np.zeros((n * n, hi - lo))
            block[feedback_rows[lo:hi], np.arange(hi - lo)] = 1.0
            self._z[:, lo:hi] = base.solve(block)[out_idx]
        self.setup_ms = (time.perf_counter() - start) * 1e3
        self.logger.debug(f"Feedback family N={n} ready in {self.setup_ms:.1f} ms")

    def raw_readout(self, g_lambda: float) -> np.ndarray:
        """(g1 / G_lambda) V[:, N-1] for this G_lambda"""
        if g_lambda <= 0:
            raise InputValidationError(f"G_lambda must be positive, got {g_lambda}")
        c = self.model.g1 / g_lambda
        m = np.eye(self.model.n - 1) / c - self._z[1:, :]
        try:
            w = np.linalg.solve(m, self._y0[1:])
        except np.linalg.LinAlgError as e:
            raise SingularSystemError(f"EGV system singular at G_lambda={g_lambda:.6g}") from e
        return _readout(self._y0 + self._z @ w, self.model.g1, g_lambda)

    def x_hat(self, g_lambda: float) -> np.ndarray:
        return align_and_normalize(self.raw_readout(g_lambda))


@dataclass(frozen=True)
class GLambdaPoint:
    g_lambda: float
    x_hat: np.ndarray
    rayleigh_quotient: float
    rayleigh_defect: float


def sweep_g_lambda(
    model: CrossbarModel,
    g_values: Iterable[float],
    v0: float = 0.1,
    settings: Optional[SolverSettings] = None,
    logger: Optional[logging.Logger] = None
) -> List[GLambdaPoint]:
    """
    Eigenvector read-out over a range of feedback conductances.

    The Rayleigh defect is smallest near the dominant eigenvalue. Values at
    which the circuit is singular are skipped.
    """
    logger = logger or logging.getLogger(__name__)
    family = FeedbackFamily(model, v0, settings, logger)
    points = []
    for g_lambda in g_values:
        try:
            x_hat = family.x_hat(float(g_lambda))
        except (SingularSystemError, DegenerateSolutionError) as e:
            logger.warning(f"Skipping G_lambda={g_lambda:.6g}: {e}")
            continue
        quotient, defect = _rayleigh(model.g, x_hat)
        points.append(GLambdaPoint(float(g_lambda), x_hat, quotient, defect))
    return points
