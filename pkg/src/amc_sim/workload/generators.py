"""
Random workload generation.

Every draw uses its own numpy Generator seeded from a SeedSequence built
from (seed, kind tag, *stream), so no global RNG state is touched and
independent streams (matrix, input, trial j) never overlap.
"""

import logging
from typing import Dict, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.exceptions import GenerationError, InputValidationError

logger = logging.getLogger(__name__)

MatrixKind = Literal["positive_definite", "diag_dominant_symmetric"]
InputKind = Literal["current", "voltage"]

_STREAM_TAGS = {
    "positive_definite": 11,
    "diag_dominant_symmetric": 12,
    "current": 21,
    "voltage": 22,
}

INPUT_RANGES = {
    "current": (1e-6, 10e-6),
    "voltage": (0.05, 0.2),
}

PD_MAX_ATTEMPTS = 20


class TechNodePreset(BaseModel):
    """Uniform wire segment resistance of a technology node"""

    model_config = ConfigDict(frozen=True)

    label: str
    r_wire: float = Field(..., gt=0)


PRESETS: Dict[str, TechNodePreset] = {
    p.label: p
    for p in (
        TechNodePreset(label="baseline", r_wire=1.0),
        TechNodePreset(label="32nm", r_wire=1.55),
        TechNodePreset(label="22nm", r_wire=2.97),
        TechNodePreset(label="16nm", r_wire=4.53),
    )
}


def preset(label: str) -> TechNodePreset:
    """Exact table lookup"""
    try:
        return PRESETS[label]
    except KeyError:
        raise InputValidationError(
            f"Unknown technology node '{label}'. Known: {', '.join(PRESETS)}"
        ) from None


def resolve_resistance(r_ohm: Optional[float] = None, node: Optional[str] = None) -> float:
    """Explicit resistance or preset label (exactly one)"""
    if (r_ohm is None) == (node is None):
        raise InputValidationError("Give exactly one of a wire resistance or a technology node")
    if node is not None:
        return preset(node).r_wire
    if not np.isfinite(r_ohm) or r_ohm <= 0:
        raise InputValidationError(f"Wire resistance must be positive, got {r_ohm}")
    return float(r_ohm)


class MatrixSpec(BaseModel):
    """
    Random conductance matrix request.

    ``floor_policy`` decides what happens when strict diagonal dominance
    cannot fit inside [g_min, g_max] (N > 9 for the default window):
    ``strict`` raises, ``relax`` lets off-diagonals fall below g_min.

    ``coupling`` scales the off-diagonal band of a diagonally dominant draw
    (1 keeps the widest band that still fits), and ``slack_floor`` is the
    smallest share of the headroom g_max - row sum given to each diagonal.
    Weakly coupled draws (coupling < 1) always leave the window and need
    the ``relax`` policy.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    kind: MatrixKind = "diag_dominant_symmetric"
    g_min: float = Field(1e-5, gt=0)
    g_max: float = Field(1e-4, gt=0)
    seed: int = Field(0, ge=0)
    floor_policy: Literal["strict", "relax"] = "strict"
    coupling: float = Field(1.0, gt=0, le=1)
    slack_floor: float = Field(0.1, ge=0, lt=1)

    @model_validator(mode="after")
    def check_window(self) -> "MatrixSpec":
        if self.g_min >= self.g_max:
            raise ValueError(f"g_min ({self.g_min}) must be below g_max ({self.g_max})")
        if self.coupling < 1 and self.floor_policy == "strict":
            raise ValueError(f"coupling {self.coupling} < 1 needs floor_policy='relax'")
        return self

    @property
    def g_mid(self) -> float:
        return 0.5 * (self.g_min + self.g_max)


def _rng(seed: int, tag: str, stream: Sequence[int]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), _STREAM_TAGS[tag], *map(int, stream)]))


def _symmetric_offdiagonal(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    upper = np.triu(rng.uniform(lo, hi, size=(n, n)), k=1)
    return upper + upper.T


def _diag_dominant(spec: MatrixSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.n
    hi = min(spec.g_mid, 0.9 * spec.g_max / (n - 1))
    lo = spec.g_min
    if hi <= spec.g_min:
        if spec.floor_policy == "strict":
            raise GenerationError(
                f"Strict diagonal dominance needs (N-1) * g_min < 0.9 * g_max; "
                f"N={n} with window [{spec.g_min:.3g}, {spec.g_max:.3g}] S is infeasible. "
                f"Use floor_policy='relax' or a wider window."
            )
        lo = hi * spec.g_min / spec.g_mid
        logger.warning(
            f"N={n}: off-diagonal conductances relaxed to [{lo:.3g}, {hi:.3g}] S "
            f"to keep dominance below g_max"
        )
    g = _symmetric_offdiagonal(rng, n, lo * spec.coupling, hi * spec.coupling)
    row_sum = g.sum(axis=1)
    slack = rng.uniform(spec.slack_floor, 1.0, size=n) * (spec.g_max - row_sum)
    g[np.diag_indices(n)] = row_sum + slack
    return g


def _positive_definite(spec: MatrixSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.n
    half_width = min(0.5 * (spec.g_mid - spec.g_min), 0.9 * (0.5 * spec.g_max - spec.g_min) / n)
    if half_width <= 0:
        raise GenerationError(f"Window [{spec.g_min:.3g}, {spec.g_max:.3g}] S too narrow for N={n}")
    for attempt in range(PD_MAX_ATTEMPTS):
        g = _symmetric_offdiagonal(rng, n, spec.g_min, spec.g_min + 2 * half_width)
        g[np.diag_indices(n)] = rng.uniform(0.5, 1.0, size=n) * spec.g_max
        if np.linalg.eigvalsh(g).min() > 0:
            return g
        logger.debug(f"PD draw {attempt + 1} for N={n} not definite, redrawing")
    raise GenerationError(f"No positive-definite draw for N={n} after {PD_MAX_ATTEMPTS} attempts")


def gen_matrix(spec: MatrixSpec, stream: Sequence[int] = ()) -> np.ndarray:
    """
    Symmetric conductance matrix (S) for ``spec``.

    Args:
        spec: Size, kind, window and seed
        stream: Extra integers that select an independent stream for the same seed

    Raises:
        GenerationError: the requested structure cannot fit the window
    """
    rng = _rng(spec.seed, spec.kind, stream)
    if spec.kind == "diag_dominant_symmetric":
        return _diag_dominant(spec, rng)
    return _positive_definite(spec, rng)


def gen_input(n: int, kind: InputKind, seed: int, stream: Sequence[int] = ()) -> np.ndarray:
    """Uniform currents in [1, 10] uA or voltages in [0.05, 0.2] V"""
    if kind not in INPUT_RANGES:
        raise InputValidationError(f"Unknown input kind '{kind}'")
    lo, hi = INPUT_RANGES[kind]
    return _rng(seed, kind, stream).uniform(lo, hi, size=n)
