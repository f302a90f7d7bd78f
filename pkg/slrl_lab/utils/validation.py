"""Type checks for config fields that arrive as raw JSON values."""

import math
from typing import Any, Tuple

from ..exceptions import ConfigError


def as_float(value: Any, field: str) -> float:
    """Finite real; ints are accepted, bools and strings are not."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field} must be a number, got {value!r}", field=field)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{field} must be finite, got {value!r}", field=field)
    return value


def as_int(value: Any, field: str) -> int:
    """Integer; integral floats such as ``1e3`` are accepted."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field} must be an integer, got {value!r}", field=field)
    if isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{field} must be an integer, got {value!r}", field=field)
    return int(value)


def as_bool(value: Any, field: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{field} must be true or false, got {value!r}", field=field)
    return value


def as_int_tuple(value: Any, field: str) -> Tuple[int, ...]:
    if isinstance(value, (str, bytes)) or not hasattr(value, "__iter__"):
        raise ConfigError(f"{field} must be a list of integers, got {value!r}", field=field)
    return tuple(as_int(v, field) for v in value)
