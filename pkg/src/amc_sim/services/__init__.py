"""Runners behind the CLI: single cells, sweeps and scaling benchmarks"""

from .bench_runner import BenchRunner, ScalingReport, fit_loglog_slope
from .errors import ErrorCategory, categorize_error
from .simulation import CellResult, SimulationRunner
from .sweep_runner import SweepCell, SweepRunner, build_cells

__all__ = [
    "BenchRunner",
    "CellResult",
    "ErrorCategory",
    "ScalingReport",
    "SimulationRunner",
    "SweepCell",
    "SweepRunner",
    "build_cells",
    "categorize_error",
    "fit_loglog_slope",
]
