"""Physical netlists of the INV, MVM and EGV crossbars"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..core.exceptions import InputValidationError
from ..core.model import CrossbarModel
from .ideal import align_and_normalize
from .netlist import GROUND, NodalSystem, OracleSolution, solve_nodal

DEFAULT_SENSE_FEEDBACK = 1e-3
DEFAULT_INVERTER_CONDUCTANCE = 1e-3


def _row(i: int, j: int) -> str:
    return f"R{i}_{j}"


def _col(i: int, j: int) -> str:
    return f"C{i}_{j}"


def _vector(values: Any, n: int, name: str) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise InputValidationError(f"{name} must be a finite vector of length {n}")
    return v


def _stamp_array(system: NodalSystem, model: CrossbarModel) -> None:
    """Devices plus the row chains (g1 along j) and column chains (g2 along i)"""
    n = model.n
    for i in range(n):
        for j in range(n):
            system.add_conductance(_row(i, j), _col(i, j), model.g[i, j])
            if j < n - 1:
                system.add_conductance(_row(i, j), _row(i, j + 1), model.g1)
            if i < n - 1:
                system.add_conductance(_col(i, j), _col(i + 1, j), model.g2)


def build_inv_netlist(model: CrossbarModel, i_in: Any) -> NodalSystem:
    """
    INV crossbar.

    I_i enters row i at column 0; the row's far end (column N-1) is the
    inverting input of op-amp i, whose output drives the bottom of column i
    through one g2 segment. Column tops are open.
    """
    n = model.n
    i_in = _vector(i_in, n, "i_in")
    system = NodalSystem("inv")
    _stamp_array(system, model)
    for i in range(n):
        system.add_current_source(_row(i, 0), i_in[i])
        system.add_conductance(_col(n - 1, i), f"OUT{i}", model.g2)
    for i in range(n):
        system.add_opamp(_row(i, n - 1), f"OUT{i}")
    return system


def build_mvm_netlist(
    model: CrossbarModel,
    v_in: Any,
    g_feedback: float = DEFAULT_SENSE_FEEDBACK
) -> NodalSystem:
    """
    Open-loop MVM crossbar.

    Row r is driven by source v_r through one g1 segment at column 0 and is
    open at its far end. Column c runs from an open top to a transimpedance
    stage at the bottom whose inverting input is a virtual ground.
    """
    n = model.n
    v_in = _vector(v_in, n, "v_in")
    system = NodalSystem("mvm")
    _stamp_array(system, model)
    for r in range(n):
        system.add_voltage_source(f"VIN{r}", v_in[r])
        system.add_conductance(f"VIN{r}", _row(r, 0), model.g1)
    for c in range(n):
        system.add_conductance(_col(n - 1, c), f"SENSE{c}", model.g2)
        system.add_conductance(f"SENSE{c}", f"TIA{c}", g_feedback)
    for c in range(n):
        system.add_opamp(f"SENSE{c}", f"TIA{c}")
    return system


def build_egv_unreduced(
    model: CrossbarModel,
    g_lambda: float,
    v0: float,
    g_inv: float = DEFAULT_INVERTER_CONDUCTANCE
) -> NodalSystem:
    """
    EGV crossbar with its read-out chain.

    Row i ends through one more g1 segment in a transimpedance op-amp with
    feedback G_lambda, followed by a unity inverter (two g_inv resistors).
    Column 0 is driven at its bottom by V0, column j >= 1 by inverter j.
    Row starts (column 0) are open. Op-amps 0..N-1 are the
    transimpedance stages, N..2N-1 the inverters.
    """
    n = model.n
    if not np.isfinite(g_lambda) or g_lambda <= 0:
        raise InputValidationError(f"G_lambda must be positive, got {g_lambda}")
    system = NodalSystem("egv")
    _stamp_array(system, model)
    for i in range(n):
        system.add_conductance(_row(i, n - 1), f"TIN{i}", model.g1)
        system.add_conductance(f"TIN{i}", f"TOUT{i}", g_lambda)
        system.add_conductance(f"TOUT{i}", f"NIN{i}", g_inv)
        system.add_conductance(f"NIN{i}", f"NOUT{i}", g_inv)
    system.add_voltage_source("DRIVE", v0)
    system.add_conductance(_col(n - 1, 0), "DRIVE", model.g2)
    for j in range(1, n):
        system.add_conductance(_col(n - 1, j), f"NOUT{j}", model.g2)
    for i in range(n):
        system.add_opamp(f"TIN{i}", f"TOUT{i}")
    for i in range(n):
        system.add_opamp(f"NIN{i}", f"NOUT{i}")
    return system


@dataclass(frozen=True)
class OracleRun:
    """Output vector of one oracle solve with its system and timing"""

    circuit: str
    output: np.ndarray
    system: NodalSystem
    solution: OracleSolution
    runtime_ms: float


def run_oracle(
    circuit: str,
    model: CrossbarModel,
    drive: Any,
    g_lambda: Optional[float] = None,
    g_feedback: float = DEFAULT_SENSE_FEEDBACK,
    g_inv: float = DEFAULT_INVERTER_CONDUCTANCE,
    logger: Optional[logging.Logger] = None
) -> OracleRun:
    """
    Build, solve and read out one circuit.

    ``drive`` is i_in (inv), v_in (mvm) or V0 (egv). Outputs are the op-amp
    voltages (inv), sensed column currents (mvm) or the sign-aligned unit
    eigenvector read from the inverter outputs (egv).
    """
    start = time.perf_counter()
    n = model.n
    if circuit == "inv":
        system = build_inv_netlist(model, drive)
        solution = solve_nodal(system, logger=logger)
        output = solution.opamp_outputs.copy()
    elif circuit == "mvm":
        system = build_mvm_netlist(model, drive, g_feedback)
        solution = solve_nodal(system, logger=logger)
        bottoms = np.array([solution.voltage(_col(n - 1, c)) for c in range(n)])
        sense = solution.opamp_inputs
        output = model.g2 * (bottoms - sense)
    elif circuit == "egv":
        if g_lambda is None:
            raise InputValidationError("EGV oracle needs g_lambda")
        system = build_egv_unreduced(model, g_lambda, float(drive), g_inv)
        solution = solve_nodal(system, logger=logger)
        output = align_and_normalize(solution.opamp_outputs[n:])
    else:
        raise InputValidationError(f"Unknown circuit '{circuit}'")
    return OracleRun(
        circuit=circuit,
        output=output,
        system=system,
        solution=solution,
        runtime_ms=(time.perf_counter() - start) * 1e3,
    )


def oracle_inv(model: CrossbarModel, i_in: Any) -> np.ndarray:
    """Op-amp output voltages of the INV netlist"""
    return run_oracle("inv", model, i_in).output


def oracle_mvm(model: CrossbarModel, v_in: Any, g_feedback: float = DEFAULT_SENSE_FEEDBACK) -> np.ndarray:
    """Sensed column currents of the MVM netlist"""
    return run_oracle("mvm", model, v_in, g_feedback=g_feedback).output


def oracle_egv(
    model: CrossbarModel,
    g_lambda: float,
    v0: float = 0.1,
    g_inv: float = DEFAULT_INVERTER_CONDUCTANCE
) -> np.ndarray:
    """Unit eigenvector read from the EGV netlist"""
    return run_oracle("egv", model, v0, g_lambda=g_lambda, g_inv=g_inv).output


__all__ = [
    "GROUND",
    "OracleRun",
    "build_egv_unreduced",
    "build_inv_netlist",
    "build_mvm_netlist",
    "oracle_egv",
    "oracle_inv",
    "oracle_mvm",
    "run_oracle",
]
