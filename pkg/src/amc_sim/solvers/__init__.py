"""Structured-Jacobian solvers for the INV, EGV and MVM circuits"""

from .base import CrossbarSolver, Diagnostics, SolverSettings
from .egv_solver import (
    EgvProblem,
    EgvSolution,
    EgvSolver,
    FeedbackFamily,
    GLambdaPoint,
    jacobian_egv,
    residual_egv,
    solve_egv,
    sweep_g_lambda,
)
from .inv_solver import (
    InvProblem,
    InvSolution,
    InvSolver,
    jacobian_inv,
    residual_inv,
    solve_inv,
    solve_linear_system,
)
from .mvm_solver import MvmProblem, MvmSolution, MvmSolver, jacobian_mvm, residual_mvm, solve_mvm

CIRCUITS = ("inv", "egv", "mvm")

__all__ = [
    "CIRCUITS",
    "CrossbarSolver",
    "Diagnostics",
    "EgvProblem",
    "EgvSolution",
    "EgvSolver",
    "FeedbackFamily",
    "GLambdaPoint",
    "InvProblem",
    "InvSolution",
    "InvSolver",
    "MvmProblem",
    "MvmSolution",
    "MvmSolver",
    "SolverSettings",
    "jacobian_egv",
    "jacobian_inv",
    "jacobian_mvm",
    "residual_egv",
    "residual_inv",
    "residual_mvm",
    "solve_egv",
    "solve_inv",
    "solve_linear_system",
    "solve_mvm",
    "sweep_g_lambda",
]
