"""Configuration loader for YAML (or JSON) config files"""

import copy
import os
from typing import Any, Dict, Optional

import yaml

from ..core.exceptions import ConfigError

DEFAULT_CONFIG: Dict[str, Any] = {
    "logging": {
        "level": "INFO",
        "log_file": None,
        "console_output": True,
    },
    "solver": {
        "residual_tol": 1e-9,
        "max_newton_steps": 2,
        "step_rtol": 1e-12,
        "permc_spec": "COLAMD",
        "equilibrate": True,
        "pivot_rtol": 1e-15,
    },
    "workload": {
        "kind": "diag_dominant_symmetric",
        "g_min": 1e-5,
        "g_max": 1e-4,
        "floor_policy": "relax",
        "coupling": 1.0,
        "slack_floor": 0.1,
    },
    "egv": {
        "v0": 0.1,
    },
    "oracle": {
        "max_n": 128,
        "g_feedback": 1e-3,
        "g_inv": 1e-3,
    },
    "compensation": {
        "initial_step": 0.02,
        "refinement_rounds": 3,
        "grid_points": 20,
        "grid_center_index": 15,
        "trials_per_candidate": 50,
        "max_workers": 1,
        "workload": {
            "inv": {"coupling": 0.01, "slack_floor": 0.9},
        },
    },
    "sweep": {
        "circuits": ["inv", "egv", "mvm"],
        "sizes": [4, 8, 16, 32, 64],
        "presets": ["baseline", "32nm", "22nm", "16nm"],
        "trials": 1,
        "max_concurrent": 4,
        "timeout_per_cell": 600,
    },
    "bench": {
        "sizes": [128, 256, 512, 1024],
        "repetitions": 3,
        "timeout_per_size": 600,
        "oracle_context_max_n": 64,
        "orderings": ["MMD_AT_PLUS_A", "COLAMD"],
        "pilot_n": 64,
    },
}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = "config/config.yaml") -> Dict[str, Any]:
    """
    Load configuration from a YAML or JSON file over the built-in defaults.

    Args:
        config_path: Path to configuration file; None returns the defaults

    Returns:
        Dictionary containing configuration

    Raises:
        FileNotFoundError: If config file doesn't exist
        ConfigError: If config file is not a valid mapping
    """
    if config_path is None:
        return copy.deepcopy(DEFAULT_CONFIG)

    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path, 'r', encoding='utf-8') as f:
        try:
            config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid configuration file {config_path}: {e}") from e

    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ConfigError(f"Configuration file {config_path} must contain a mapping")
    return _deep_merge(DEFAULT_CONFIG, config)


def get_logging_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Extract logging configuration"""
    return config.get('logging', {})


def get_solver_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Extract solver configuration"""
    return config.get('solver', {})


def get_workload_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Extract workload generation configuration"""
    return config.get('workload', {})


def get_egv_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return config.get('egv', {})


def get_oracle_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return config.get('oracle', {})


def get_compensation_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Extract bias search configuration"""
    return config.get('compensation', {})


def get_sweep_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return config.get('sweep', {})


def get_bench_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return config.get('bench', {})
