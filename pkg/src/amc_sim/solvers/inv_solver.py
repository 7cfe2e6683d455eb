"""Matrix inversion (INV) circuit with interconnect resistance"""

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


class InvProblem(BaseModel):
    """Crossbar plus the input currents I_1..I_N (A) injected at the row starts"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: CrossbarModel
    i_in: np.ndarray

    @field_validator("i_in", mode="before")
    @classmethod
    def validate_currents(cls, v: Any) -> np.ndarray:
        i_in = np.asarray(v, dtype=float)
        if i_in.ndim != 1:
            raise DimensionError(f"i_in must be a vector, got shape {i_in.shape}")
        if not np.all(np.isfinite(i_in)):
            raise InputValidationError("i_in contains NaN or Inf")
        return i_in

    @model_validator(mode="after")
    def check_length(self) -> "InvProblem":
        if self.i_in.size != self.model.n:
            raise DimensionError(f"i_in has length {self.i_in.size}, expected {self.model.n}")
        return self

    @property
    def i0(self) -> np.ndarray:
        return input_matrix(self.i_in)


@dataclass(frozen=True)
class InvSolution:
    v_out: np.ndarray
    theta: np.ndarray
    residual_norm: float
    diagnostics: Diagnostics


def input_matrix(i_in: np.ndarray) -> np.ndarray:
    """I_0: input currents in the first column, zeros elsewhere"""
    n = i_in.size
    i0 = np.zeros((n, n))
    i0[:, 0] = i_in
    return i0


def residual_inv(theta: np.ndarray, model: CrossbarModel, i0: np.ndarray) -> np.ndarray:
    """
    F(theta) = I0/g2 + (theta M2)^T - (g1/g2) theta M1 D - D theta M1
               - D[(1/G) o (g1 theta M1 D - I0)]

    Columns 0..N-2 of theta hold the row-node potentials, column N-1 the op-amp
    outputs.
    """
    n = model.n
    if theta.shape != (n, n) or i0.shape != (n, n):
        raise DimensionError(f"theta and i0 must be ({n}, {n})")
    inv_g = reciprocal_conductance(model.g)
    ops = operators_for(n)
    g1, g2 = model.g1, model.g2
    theta_m1 = theta @ ops.m1
    theta_m1_d = theta_m1 @ ops.d
    return (
        i0 / g2
        + (theta @ ops.m2).T
        - (g1 / g2) * theta_m1_d
        - ops.d @ theta_m1
        - ops.d @ (inv_g * (g1 * theta_m1_d - i0))
    )


def jacobian_inv(model: CrossbarModel) -> SparseSystem:
    """Constant J with vec(F(theta) - F(0)) = J vec(theta)"""
    n = model.n
    inv_g = reciprocal_conductance(model.g)
    ops = operators_for(n)
    g1, g2 = model.g1, model.g2
    row_nodes = np.arange(n) < n - 1

    stamper = JacobianStamper(n)
    last = np.full(n, n - 1)
    idx = np.arange(n)
    # (theta M2)^T: F(N-1, j) <- theta(j, N-1)
    stamper.entries((last, idx), (idx, last), np.ones(n))
    stamper.right(ops.d, -g1 / g2, src_cols=row_nodes)
    stamper.left(ops.d, -1.0, src_cols=row_nodes)
    stamper.sandwich(ops.d, inv_g, ops.d, -g1, src_cols=row_nodes)
    return stamper.compress()


class InvSolver(CrossbarSolver):
    """
    INV circuit bound to one crossbar.

    For stability G should be positive definite; this is not enforced.
    """

    circuit = "inv"

    def _assemble(self) -> SparseSystem:
        return jacobian_inv(self.model)

    def solve(self, i_in: Any) -> InvSolution:
        i_in = as_vector(i_in, self.n, "i_in")
        i0 = input_matrix(i_in)
        scale = max(1.0, float(np.max(np.abs(i0))) / self.model.g2)
        theta, norm, diagnostics = self._newton(
            lambda t: residual_inv(t, self.model, i0), scale
        )
        return InvSolution(
            v_out=theta[:, -1].copy(),
            theta=theta,
            residual_norm=norm,
            diagnostics=diagnostics,
        )


def solve_inv(
    problem: InvProblem,
    settings: Optional[SolverSettings] = None,
    logger: Optional[logging.Logger] = None
) -> InvSolution:
    """One factor-and-solve of the INV circuit"""
    return InvSolver(problem.model, settings, logger).solve(problem.i_in)


def solve_linear_system(
    a: Any,
    b: Any,
    r1: float,
    r2: Optional[float] = None,
    settings: Optional[SolverSettings] = None
) -> InvSolution:
    """
    Solve A x = b on an INV crossbar with wire resistances r1/r2 (ohm).

    With ideal op-amps the outputs satisfy G v = -i_in, so the circuit is
    driven with i_in = -b and v_out tends to A^-1 b as the wires vanish.
    """
    model = CrossbarModel.from_resistance(a, r1, r2)
    b = as_vector(b, model.n, "b")
    return InvSolver(model, settings).solve(-b)
