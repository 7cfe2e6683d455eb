"""Crossbar circuit description shared by the INV, EGV and MVM solvers"""

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import DimensionError, InputValidationError, ZeroConductanceError


def reciprocal_conductance(g: np.ndarray) -> np.ndarray:
    """
    Element-wise 1/G.

    Raises:
        ZeroConductanceError: naming the first cell with G_ij = 0
    """
    zeros = np.argwhere(g == 0)
    if zeros.size:
        i, j = (int(k) for k in zeros[0])
        raise ZeroConductanceError((i, j))
    return 1.0 / g


def _freeze(array: np.ndarray) -> np.ndarray:
    frozen = np.array(array, dtype=float, copy=True)
    frozen.setflags(write=False)
    return frozen


class CrossbarModel(BaseModel):
    """
    N x N resistive crossbar with uniform row and column wire segments.

    Conductances are in siemens. ``g1``/``g2`` are the row/column segment
    conductances (1/r1 and 1/r2).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=2, description="Matrix dimension N")
    g: np.ndarray = Field(..., description="Device conductances G_ij (S)")
    g1: float = Field(..., gt=0, description="Row wire segment conductance (S)")
    g2: float = Field(..., gt=0, description="Column wire segment conductance (S)")

    @model_validator(mode="before")
    @classmethod
    def infer_dimension(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("n") is None and data.get("g") is not None:
            shape = np.shape(data["g"])
            if len(shape) == 2:
                data = {**data, "n": shape[0]}
        return data

    @field_validator("g", mode="before")
    @classmethod
    def validate_conductances(cls, v: Any) -> np.ndarray:
        """Square, finite, strictly positive"""
        g = np.asarray(v, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionError(f"Conductance matrix must be square, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InputValidationError("Conductance matrix contains NaN or Inf")
        reciprocal_conductance(g)
        if np.any(g < 0):
            i, j = (int(k) for k in np.argwhere(g < 0)[0])
            raise InputValidationError(f"Conductance G({i}, {j}) = {g[i, j]} is negative")
        return _freeze(g)

    @model_validator(mode="after")
    def check_shape(self) -> "CrossbarModel":
        if self.g.shape != (self.n, self.n):
            raise DimensionError(f"G has shape {self.g.shape}, expected ({self.n}, {self.n})")
        return self

    @classmethod
    def from_resistance(
        cls,
        g: Any,
        r1: float,
        r2: Optional[float] = None
    ) -> "CrossbarModel":
        """
        Build a model from wire segment resistances in ohms.

        Args:
            g: N x N conductance matrix (S)
            r1: Row segment resistance (ohm)
            r2: Column segment resistance (ohm); defaults to r1
        """
        r2 = r1 if r2 is None else r2
        for label, r in (("r1", r1), ("r2", r2)):
            if not np.isfinite(r) or r <= 0:
                raise InputValidationError(f"Wire resistance {label} must be positive, got {r}")
        return cls(g=g, g1=1.0 / r1, g2=1.0 / r2)

    @property
    def r1(self) -> float:
        return 1.0 / self.g1

    @property
    def r2(self) -> float:
        return 1.0 / self.g2

    @property
    def inverse_g(self) -> np.ndarray:
        return reciprocal_conductance(self.g)

    def with_resistance(self, r1: float, r2: Optional[float] = None) -> "CrossbarModel":
        """Same devices, different wires"""
        return CrossbarModel.from_resistance(self.g, r1, r2)

    def __repr__(self) -> str:
        return f"CrossbarModel(n={self.n}, r1={self.r1:.4g}, r2={self.r2:.4g})"
