"""Independent nodal-analysis oracle and ideal-circuit references"""

from .circuits import (
    OracleRun,
    build_egv_unreduced,
    build_inv_netlist,
    build_mvm_netlist,
    oracle_egv,
    oracle_inv,
    oracle_mvm,
    run_oracle,
)
from .ideal import align_and_normalize, ideal_egv, ideal_inv, ideal_mvm
from .netlist import GROUND, NodalSystem, OracleSolution, dump_netlist, kcl_residuals, solve_nodal

__all__ = [
    "GROUND",
    "NodalSystem",
    "OracleRun",
    "OracleSolution",
    "align_and_normalize",
    "build_egv_unreduced",
    "build_inv_netlist",
    "build_mvm_netlist",
    "dump_netlist",
    "ideal_egv",
    "ideal_inv",
    "ideal_mvm",
    "kcl_residuals",
    "oracle_egv",
    "oracle_inv",
    "oracle_mvm",
    "run_oracle",
    "solve_nodal",
]
