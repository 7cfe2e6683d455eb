"""Pydantic models for CLI runs and their output rows"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..workload.generators import resolve_resistance

Circuit = Literal["inv", "egv", "mvm"]


class RunConfig(BaseModel):
    """One simulate/compensate/oracle invocation after CLI and config merging"""

    model_config = ConfigDict(frozen=True)

    circuit: Circuit
    n: Optional[int] = Field(None, ge=2)
    matrix_path: Optional[str] = None
    gen: Optional[Literal["pd", "dds"]] = None
    r_ohm: Optional[float] = Field(None, gt=0)
    node: Optional[Literal["baseline", "32nm", "22nm", "16nm"]] = None
    trials: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    oracle: bool = False
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def check_sources(self) -> "RunConfig":
        if self.matrix_path is not None and self.gen is not None:
            raise ValueError("--matrix and --gen are mutually exclusive")
        if self.matrix_path is None and self.n is None:
            raise ValueError("--n is required when no --matrix file is given")
        if self.r_ohm is not None and self.node is not None:
            raise ValueError("--r and --node are mutually exclusive")
        return self

    @property
    def wire_resistance(self) -> float:
        if self.r_ohm is None and self.node is None:
            return resolve_resistance(node="baseline")
        return resolve_resistance(self.r_ohm, self.node)

    @property
    def matrix_kind(self) -> str:
        return "positive_definite" if self.gen == "pd" else "diag_dominant_symmetric"


class BenchRecord(BaseModel):
    """One (circuit, n, r, trial) cell of a simulate or sweep run; times in ms"""

    circuit: Circuit
    n: int = Field(..., ge=2)
    r_ohm: float = Field(..., gt=0)
    node: Optional[str] = None
    trial: int = Field(0, ge=0)
    seed: int = Field(0, ge=0)
    status: Literal["ok", "failed"] = "ok"
    re_vs_ideal: Optional[float] = Field(None, ge=0)
    re_vs_oracle: Optional[float] = Field(None, ge=0)
    residual_norm: Optional[float] = Field(None, ge=0)
    assembly_ms: float = Field(0.0, ge=0)
    factor_ms: float = Field(0.0, ge=0)
    solve_ms: float = Field(0.0, ge=0)
    total_ms: float = Field(0.0, ge=0)
    oracle_ms: Optional[float] = Field(None, ge=0)
    nnz: int = Field(0, ge=0)
    sparsity: float = Field(0.0, ge=0, le=1)
    fill_in: int = Field(0, ge=0)
    error: Optional[str] = None


class ScalingRow(BaseModel):
    """Median timings of one bench size"""

    circuit: Circuit
    n: int = Field(..., ge=2)
    status: Literal["ok", "skipped", "failed"] = "ok"
    repetitions: int = Field(0, ge=0)
    permc_spec: Optional[str] = None
    assembly_ms: Optional[float] = Field(None, ge=0)
    factor_ms: Optional[float] = Field(None, ge=0)
    solve_ms: Optional[float] = Field(None, ge=0)
    total_ms: Optional[float] = Field(None, ge=0)
    nnz: Optional[int] = Field(None, ge=0)
    nnz_per_n2: Optional[float] = Field(None, ge=0)
    sparsity: Optional[float] = Field(None, ge=0, le=1)
    peak_fill_in: Optional[int] = Field(None, ge=0)
    fill_ratio: Optional[float] = Field(None, ge=0)
    oracle_ms: Optional[float] = Field(None, ge=0)
    note: Optional[str] = None


class BiasSummaryRow(BaseModel):
    circuit: Circuit
    n: int
    r_ohm: float
    seed: int
    optimal_bias_ratio: float
    baseline_re: float
    min_re: float
    delta_re: float
