"""Utility functions"""

from .config_loader import (
    DEFAULT_CONFIG,
    get_bench_config,
    get_compensation_config,
    get_egv_config,
    get_logging_config,
    get_oracle_config,
    get_solver_config,
    get_sweep_config,
    get_workload_config,
    load_config,
)
from .logger import setup_logger
from .parse_utils import parse_float_list, parse_int_list, parse_label_list

__all__ = [
    "DEFAULT_CONFIG",
    "get_bench_config",
    "get_compensation_config",
    "get_egv_config",
    "get_logging_config",
    "get_oracle_config",
    "get_solver_config",
    "get_sweep_config",
    "get_workload_config",
    "load_config",
    "parse_float_list",
    "parse_int_list",
    "parse_label_list",
    "setup_logger",
]
