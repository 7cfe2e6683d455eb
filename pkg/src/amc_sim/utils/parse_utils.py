"""Parsing helpers for comma-separated CLI values and config lists.

Examples:
    >>> parse_int_list("4, 8,16")
    [4, 8, 16]
    >>> parse_float_list("-0.01,0,1e-3")
    [-0.01, 0.0, 0.001]
    >>> parse_label_list("baseline,16nm")
    ['baseline', '16nm']
"""

from typing import Iterable, List, Union

ListLike = Union[str, Iterable]


def _items(value: ListLike) -> List[str]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return [str(part).strip() for part in value]


def parse_int_list(value: ListLike) -> List[int]:
    """
    Parse "4,8,16" (or a list) into integers.

    Raises:
        ValueError: on any non-integer item or an empty list
    """
    items = _items(value)
    if not items:
        raise ValueError("Expected at least one integer")
    try:
        return [int(item) for item in items]
    except ValueError:
        raise ValueError(f"Expected comma-separated integers, got '{value}'") from None


def parse_float_list(value: ListLike) -> List[float]:
    """Parse "-0.01,0,0.01" (or a list) into floats"""
    items = _items(value)
    if not items:
        raise ValueError("Expected at least one number")
    try:
        return [float(item) for item in items]
    except ValueError:
        raise ValueError(f"Expected comma-separated numbers, got '{value}'") from None


def parse_label_list(value: ListLike) -> List[str]:
    """Parse "baseline,16nm" (or a list) into stripped labels"""
    items = _items(value)
    if not items:
        raise ValueError("Expected at least one label")
    return items
