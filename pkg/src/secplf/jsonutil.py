"""JSON helpers: exact rationals travel as strings ("49500/101", "10")."""

from __future__ import annotations

import enum
from dataclasses import fields, is_dataclass
from fractions import Fraction


def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, float, str)):
        return obj
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else "/".join(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def parse_fraction(value, path: str = "value") -> Fraction:
    from .errors import ConfigError

    if isinstance(value, bool):
        raise ConfigError(path, "expected a number, got a boolean")
    if isinstance(value, float):
        # floats in config are taken at their shortest decimal spelling
        value = repr(value)
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(path, f"expected an exact number, got {value!r}") from None


def opt_fraction(value):
    return None if value is None else Fraction(value)
