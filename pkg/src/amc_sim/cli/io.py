"""
File formats.

Matrices are CSV with N rows of N comma-separated conductances (S), vectors
one value per line. Tables (records, curves, scaling rows) are CSV with a
header row, preceded by ``# key=value`` lines echoing the effective
configuration; the JSON variant holds the same data as
``{"config": {...}, "records": [...]}``.
"""

import json
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Type, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..core.exceptions import MatrixFileError
from .models import BenchRecord

RecordT = TypeVar("RecordT", bound=BaseModel)


def flatten_config(config: Mapping[str, Any], prefix: str = "") -> Dict[str, str]:
    """{"solver": {"tol": 1}} -> {"solver.tol": "1"}"""
    flat: Dict[str, str] = {}
    for key, value in config.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten_config(value, f"{name}."))
        elif isinstance(value, (list, tuple)):
            flat[name] = ",".join(str(v) for v in value)
        else:
            flat[name] = "" if value is None else str(value)
    return flat


def _open_for_write(path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def _write_header(handle, header: Optional[Mapping[str, Any]]) -> None:
    for key, value in flatten_config(header or {}).items():
        handle.write(f"# {key}={value}\n")


def read_header(path: str) -> Dict[str, str]:
    """Echoed ``# key=value`` lines of a CSV output"""
    header: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value
    return header


def load_matrix_csv(path: str) -> np.ndarray:
    """
    Read an N x N conductance matrix.

    Raises:
        MatrixFileError: missing file, non-numeric cells or a non-square table
    """
    try:
        frame = pd.read_csv(
            path, header=None, comment="#", skipinitialspace=True, float_precision="round_trip"
        )
        matrix = frame.to_numpy(dtype=float)
    except FileNotFoundError as e:
        raise MatrixFileError(f"Matrix file not found: {path}") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError, ValueError) as e:
        raise MatrixFileError(f"Malformed matrix file {path}: {e}") from e
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise MatrixFileError(f"Matrix file {path} is not square: shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise MatrixFileError(f"Matrix file {path} has empty or non-finite cells")
    return matrix


def load_vector_csv(path: str) -> np.ndarray:
    """Read a vector stored one value per line"""
    try:
        frame = pd.read_csv(
            path, header=None, comment="#", skipinitialspace=True, float_precision="round_trip"
        )
        vector = frame.to_numpy(dtype=float)
    except FileNotFoundError as e:
        raise MatrixFileError(f"Vector file not found: {path}") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError, ValueError) as e:
        raise MatrixFileError(f"Malformed vector file {path}: {e}") from e
    if vector.shape[1] != 1:
        raise MatrixFileError(f"Vector file {path} must have one value per line")
    return vector[:, 0]


def write_matrix_csv(path: str, matrix: np.ndarray) -> None:
    with _open_for_write(path) as f:
        pd.DataFrame(np.asarray(matrix, dtype=float)).to_csv(f, header=False, index=False)


def write_vector_csv(path: str, values: Sequence[float], header: Optional[Mapping[str, Any]] = None) -> None:
    with _open_for_write(path) as f:
        _write_header(f, header)
        pd.Series(np.asarray(values, dtype=float)).to_csv(f, header=False, index=False)


def write_records(
    path: str,
    records: Iterable[BaseModel],
    header: Optional[Mapping[str, Any]] = None,
    fmt: str = "csv",
    columns: Optional[List[str]] = None
) -> None:
    """Write pydantic rows as CSV (with echoed header) or JSON"""
    rows = [r.model_dump(mode="json") for r in records]
    if fmt == "json":
        with _open_for_write(path) as f:
            json.dump({"config": dict(header or {}), "records": rows}, f, indent=2)
        return
    frame = pd.DataFrame(rows, columns=columns)
    with _open_for_write(path) as f:
        _write_header(f, header)
        frame.to_csv(f, index=False)


def write_curve(path: str, curve: Sequence[Sequence[float]], header: Optional[Mapping[str, Any]] = None,
                fmt: str = "csv") -> None:
    """(bias ratio, mean RE) pairs"""
    rows = [{"bias_ratio": float(r), "mean_re": float(e)} for r, e in curve]
    if fmt == "json":
        with _open_for_write(path) as f:
            json.dump({"config": dict(header or {}), "records": rows}, f, indent=2)
        return
    with _open_for_write(path) as f:
        _write_header(f, header)
        pd.DataFrame(rows, columns=["bias_ratio", "mean_re"]).to_csv(f, index=False)


def _native(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def read_records(path: str, model: Type[RecordT] = BenchRecord) -> List[RecordT]:
    """Parse a table written by write_records back into models"""
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        return [model(**row) for row in payload["records"]]
    string_columns = {c: "string" for c in ("node", "error", "note") if c in model.model_fields}
    frame = pd.read_csv(path, comment="#", dtype=string_columns, float_precision="round_trip")
    frame = frame.astype(object).where(pd.notna(frame), None)
    return [
        model(**{k: _native(v) for k, v in row.items()})
        for row in frame.to_dict(orient="records")
    ]
