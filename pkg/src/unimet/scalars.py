"""Exact scalar arithmetic.

All combinatorial constructions in this package run on ``fractions.Fraction``
so that every certified identity is exact, never approximate.  Floats appear
only in the Euclidean-cone comparisons (see ``conemodels``), where
trigonometric functions make exactness impossible; the boundary is explicit.

Wire format: a scalar serializes to the string ``"p/q"`` (or ``"p"`` for an
integer value) and parses from that form, from a decimal string, or from a
plain integer.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_scalar(value: ScalarLike) -> Fraction:
    """Coerce an int, Fraction, "p/q" string, or decimal string to a Fraction.

    Floats are rejected on purpose: silently converting a float would launder
    rounding error into the exact layer.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse scalar from {value!r}") from exc
    raise TypeError(f"cannot coerce {type(value).__name__} to an exact scalar")


def format_scalar(value: Fraction) -> str:
    """Serialize a Fraction as "p/q" (or "p" when the denominator is 1)."""
    return str(value)


def pow2(n: int) -> Fraction:
    """2**n as an exact Fraction, for any integer n."""
    if n >= 0:
        return Fraction(1 << n)
    return Fraction(1, 1 << (-n))
