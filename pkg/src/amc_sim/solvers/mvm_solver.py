"""Open-loop matrix-vector multiplication (MVM) crossbar with interconnect resistance"""

import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..core.exceptions import DimensionError, InputValidationError
from ..core.model import CrossbarModel, reciprocal_conductance
from ..core.operators import operators_for
from ..sparse import SparseSystem
from .base import CrossbarSolver, Diagnostics, SolverSettings, as_vector
from .stamping import JacobianStamper


class MvmProblem(BaseModel):
    """Crossbar plus the row drive voltages (V)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: CrossbarModel
    v_in: np.ndarray

    @field_validator("v_in", mode="before")
    @classmethod
    def validate_voltages(cls, v: Any) -> np.ndarray:
        v_in = np.asarray(v, dtype=float)
        if v_in.ndim != 1:
            raise DimensionError(f"v_in must be a vector, got shape {v_in.shape}")
        if not np.all(np.isfinite(v_in)):
            raise InputValidationError("v_in contains NaN or Inf")
        return v_in

    @model_validator(mode="after")
    def check_length(self) -> "MvmProblem":
        if self.v_in.size != self.model.n:
            raise DimensionError(f"v_in has length {self.v_in.size}, expected {self.model.n}")
        return self


@dataclass(frozen=True)
class MvmSolution:
    i_out: np.ndarray
    u_field: np.ndarray
    residual_norm: float
    diagnostics: Diagnostics


def ideal_voltage_matrix(v_in: np.ndarray) -> np.ndarray:
    """V_ideal: every row equal to v_in, so D1 V_ideal = e_1 v_in^T"""
    return np.tile(v_in, (v_in.size, 1))


def residual_mvm(u: np.ndarray, problem: MvmProblem) -> np.ndarray:
    """
    F(U) = g2 D1[(1/Gs) o U D] + (g2/g1) U D + D1 U - D1 V_ideal

    U is sense-major: U[c, r] is the node on column wire c at row r, and
    Gs = G^T. Column wires end at row N-1 in a virtual ground; row wires are
    driven at column 0.
    """
    model = problem.model
    n = model.n
    if u.shape != (n, n):
        raise DimensionError(f"U must be ({n}, {n}), got {u.shape}")
    inv_gs = reciprocal_conductance(model.g).T
    ops = operators_for(n)
    g1, g2 = model.g1, model.g2
    ud = u @ ops.d
    return (
        g2 * (ops.d1 @ (inv_gs * ud))
        + (g2 / g1) * ud
        + ops.d1 @ u
        - ops.d1 @ ideal_voltage_matrix(problem.v_in)
    )


def jacobian_mvm(model: CrossbarModel) -> SparseSystem:
    """Constant J with vec(F(U) - F(0)) = J vec(U)"""
    ops = operators_for(model.n)
    stamper = JacobianStamper(model.n)
    stamper.sandwich(ops.d1, reciprocal_conductance(model.g).T, ops.d, model.g2)
    stamper.right(ops.d, model.g2 / model.g1)
    stamper.left(ops.d1, 1.0)
    return stamper.compress()


class MvmSolver(CrossbarSolver):
    """MVM crossbar bound to one model"""

    circuit = "mvm"

    def _assemble(self) -> SparseSystem:
        return jacobian_mvm(self.model)

    def solve(self, v_in: Any) -> MvmSolution:
        v_in = as_vector(v_in, self.n, "v_in")
        problem = MvmProblem(model=self.model, v_in=v_in)
        scale = max(1.0, float(np.max(np.abs(v_in))))
        u, norm, diagnostics = self._newton(lambda x: residual_mvm(x, problem), scale)
        return MvmSolution(
            i_out=self.model.g2 * u[:, -1],
            u_field=u,
            residual_norm=norm,
            diagnostics=diagnostics,
        )


def solve_mvm(
    problem: MvmProblem,
    settings: Optional[SolverSettings] = None,
    logger: Optional[logging.Logger] = None
) -> MvmSolution:
    """One factor-and-solve of the MVM crossbar"""
    return MvmSolver(problem.model, settings, logger).solve(problem.v_in)
