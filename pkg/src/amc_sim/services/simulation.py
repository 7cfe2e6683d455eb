"""Single simulation cell: generate or load, solve, compare with references"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..cli.models import BenchRecord
from ..compensation.metrics import re_egv, re_inv
from ..core.model import CrossbarModel
from ..oracle.circuits import run_oracle
from ..oracle.ideal import ideal_egv, ideal_inv, ideal_mvm
from ..solvers import EgvSolver, InvSolver, MvmSolver, SolverSettings
from ..utils.config_loader import (
    get_compensation_config,
    get_egv_config,
    get_oracle_config,
    get_solver_config,
    get_workload_config,
)
from ..workload.generators import MatrixSpec, gen_input, gen_matrix
from .errors import categorize_error


@dataclass(frozen=True)
class CellResult:
    record: BenchRecord
    output: np.ndarray
    ideal: np.ndarray
    oracle_output: Optional[np.ndarray] = None


class SimulationRunner:
    """Runs one circuit instance and summarizes it as a BenchRecord"""

    def __init__(self, config: Dict[str, Any], logger: Optional[logging.Logger] = None):
        self.config = config
        self.logger = logger or logging.getLogger(__name__)
        self.settings = SolverSettings.from_config(get_solver_config(config))
        self.workload = get_workload_config(config)
        self.v0 = float(get_egv_config(config).get("v0", 0.1))
        oracle = get_oracle_config(config)
        self.oracle_max_n = int(oracle.get("max_n", 128))
        self.g_feedback = float(oracle.get("g_feedback", 1e-3))
        self.g_inv = float(oracle.get("g_inv", 1e-3))

    def compensation_workload(self, circuit: str) -> Dict[str, Any]:
        """Workload section with the bias search overrides for ``circuit`` on top"""
        overrides = get_compensation_config(self.config).get("workload") or {}
        return {**self.workload, **(overrides.get(circuit) or {})}

    def generate_matrix(
        self,
        n: int,
        seed: int,
        trial: int = 0,
        kind: Optional[str] = None,
        workload: Optional[Dict[str, Any]] = None
    ) -> np.ndarray:
        workload = self.workload if workload is None else workload
        spec = MatrixSpec(
            n=n,
            kind=kind or workload.get("kind", "diag_dominant_symmetric"),
            g_min=workload.get("g_min", 1e-5),
            g_max=workload.get("g_max", 1e-4),
            seed=seed,
            floor_policy=workload.get("floor_policy", "relax"),
            coupling=workload.get("coupling", 1.0),
            slack_floor=workload.get("slack_floor", 0.1),
        )
        return gen_matrix(spec, (n, trial))

    def build_model(
        self,
        n: int,
        r_ohm: float,
        seed: int,
        trial: int = 0,
        kind: Optional[str] = None,
        matrix: Optional[np.ndarray] = None,
        workload: Optional[Dict[str, Any]] = None
    ) -> CrossbarModel:
        g = matrix if matrix is not None else self.generate_matrix(n, seed, trial, kind, workload)
        return CrossbarModel.from_resistance(g, r_ohm)

    def default_drive(self, circuit: str, n: int, seed: int, trial: int = 0) -> Any:
        if circuit == "inv":
            return gen_input(n, "current", seed, (n, trial))
        if circuit == "mvm":
            return gen_input(n, "voltage", seed, (n, trial))
        return self.v0

    def run_cell(
        self,
        circuit: str,
        model: CrossbarModel,
        seed: int = 0,
        trial: int = 0,
        node: Optional[str] = None,
        oracle: bool = False,
        drive: Any = None
    ) -> CellResult:
        """
        Solve one instance.

        ``drive`` is b (inv, A x = b convention), v_in (mvm) or V0 (egv);
        generated from the seed when omitted.
        """
        n = model.n
        drive = self.default_drive(circuit, n, seed, trial) if drive is None else drive
        oracle_output = None
        oracle_ms = None

        if circuit == "inv":
            b = np.asarray(drive, dtype=float)
            solution = InvSolver(model, self.settings, self.logger).solve(-b)
            output, ideal = solution.v_out, ideal_inv(model.g, b)
            metric, oracle_drive, g_lambda = re_inv, -b, None
        elif circuit == "mvm":
            v = np.asarray(drive, dtype=float)
            solution = MvmSolver(model, self.settings, self.logger).solve(v)
            output, ideal = solution.i_out, ideal_mvm(model.g, v)
            metric, oracle_drive, g_lambda = re_inv, v, None
        elif circuit == "egv":
            g_lambda, ideal = ideal_egv(model.g)
            solution = EgvSolver(model, g_lambda, self.settings, self.logger).solve(float(drive))
            output = solution.x_hat
            metric, oracle_drive = re_egv, float(drive)
        else:
            raise ValueError(f"Unknown circuit '{circuit}'")

        re_vs_oracle = None
        if oracle:
            if n > self.oracle_max_n:
                self.logger.warning(f"Oracle skipped for N={n} (limit {self.oracle_max_n})")
            else:
                run = run_oracle(
                    circuit,
                    model,
                    oracle_drive,
                    g_lambda=g_lambda,
                    g_feedback=self.g_feedback,
                    g_inv=self.g_inv,
                    logger=self.logger,
                )
                oracle_output, oracle_ms = run.output, run.runtime_ms
                re_vs_oracle = metric(output, oracle_output)

        diag = solution.diagnostics
        record = BenchRecord(
            circuit=circuit,
            n=n,
            r_ohm=model.r1,
            node=node,
            trial=trial,
            seed=seed,
            re_vs_ideal=metric(output, ideal),
            re_vs_oracle=re_vs_oracle,
            residual_norm=solution.residual_norm,
            assembly_ms=diag.assembly_ms,
            factor_ms=diag.factor_ms,
            solve_ms=diag.solve_ms,
            total_ms=diag.total_ms,
            oracle_ms=oracle_ms,
            nnz=diag.nnz,
            sparsity=diag.sparsity,
            fill_in=diag.fill_in,
        )
        return CellResult(record=record, output=output, ideal=ideal, oracle_output=oracle_output)

    @staticmethod
    def failure_record(
        circuit: str,
        n: int,
        r_ohm: float,
        error: BaseException,
        seed: int = 0,
        trial: int = 0,
        node: Optional[str] = None
    ) -> BenchRecord:
        category = categorize_error(error)
        return BenchRecord(
            circuit=circuit,
            n=n,
            r_ohm=r_ohm,
            node=node,
            trial=trial,
            seed=seed,
            status="failed",
            error=f"{category.value}: {error}",
        )
