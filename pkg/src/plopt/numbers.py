"""Exact number parsing and rendering.

Every weight, score, gain and cost is held as a :class:`fractions.Fraction`.
Files carry them as strings: a plain decimal (``"0.25"``) or, for values
with no finite decimal expansion, a ratio (``"1/3"``).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, int, str]


def to_fraction(value: object) -> Fraction:
    """Parse a decimal string, ratio string or integer into a Fraction.

    Floats are rejected: ``0.1`` as a float is not one tenth.
    """
    if isinstance(value, bool):
        raise TypeError(f"expected a number, got {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not an exact number: {value!r}") from None
    raise TypeError(f"expected a decimal string, got {type(value).__name__} {value!r}")


def is_terminating(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def format_number(q: Fraction | int) -> str:
    """Render exactly: a decimal without trailing zeros, else ``n/d``."""
    q = Fraction(q)
    if not is_terminating(q):
        return f"{q.numerator}/{q.denominator}"
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, rem = divmod(q.numerator, q.denominator)
    if rem == 0:
        return f"{sign}{whole}"
    digits = []
    while rem:
        rem *= 10
        d, rem = divmod(rem, q.denominator)
        digits.append(str(d))
    return f"{sign}{whole}.{''.join(digits)}"


def clamp01(q: Fraction) -> Fraction:
    if q < 0:
        return Fraction(0)
    if q > 1:
        return Fraction(1)
    return q
