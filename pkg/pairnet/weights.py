"""
Exact edge weights.

A Weight is a non-negative int or Fraction. Fractions whose denominator is 1
are collapsed to int so the common all-integer case never touches Fraction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Weight = Union[int, Fraction]

ZERO: Weight = 0


def normalize(value: Weight) -> Weight:
    """Collapse an integral Fraction to int."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value.numerator)
    return value


def as_weight(value) -> Weight:
    """Parse an int, Fraction or "a/b" string into a Weight.

    Floats are refused: every cost decision must stay exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return normalize(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty weight string")
        return normalize(Fraction(text))
    raise TypeError(f"unsupported weight type {type(value).__name__}")


def to_json(value: Weight):
    """JSON form: ints stay ints, other rationals become "a/b" strings."""
    value = normalize(value)
    if isinstance(value, int):
        return value
    return f"{value.numerator}/{value.denominator}"


def to_text(value: Weight) -> str:
    return str(to_json(value))


def to_decimal(value: Weight, places: int = 6) -> str:
    """Human-readable decimal approximation for report columns."""
    return f"{float(value):.{places}f}"
