"""Reproducible conductance matrices, inputs and technology-node presets"""

from .generators import (
    INPUT_RANGES,
    PRESETS,
    MatrixSpec,
    TechNodePreset,
    gen_input,
    gen_matrix,
    preset,
    resolve_resistance,
)

__all__ = [
    "INPUT_RANGES",
    "PRESETS",
    "MatrixSpec",
    "TechNodePreset",
    "gen_input",
    "gen_matrix",
    "preset",
    "resolve_resistance",
]
