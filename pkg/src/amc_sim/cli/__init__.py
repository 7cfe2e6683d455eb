"""Command-line models and file formats; the entry point lives in ``amc_sim.cli.main``"""

from .io import (
    load_matrix_csv,
    load_vector_csv,
    read_header,
    read_records,
    write_curve,
    write_matrix_csv,
    write_records,
    write_vector_csv,
)
from .models import BenchRecord, BiasSummaryRow, RunConfig, ScalingRow

__all__ = [
    "BenchRecord",
    "BiasSummaryRow",
    "RunConfig",
    "ScalingRow",
    "load_matrix_csv",
    "load_vector_csv",
    "read_header",
    "read_records",
    "write_curve",
    "write_matrix_csv",
    "write_records",
    "write_vector_csv",
]
