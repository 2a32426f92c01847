"""Exact rational helpers shared by every module.

Degrees, weights and thresholds are held as :class:`fractions.Fraction` so
comparisons such as ``degree >= 0.8`` never depend on binary rounding.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from numbers import Rational

Number = int | float | Decimal | Fraction


def as_fraction(value: Number | str) -> Fraction:
    """Convert to an exact Fraction, reading floats by their shortest repr.

    ``as_fraction(0.79)`` is ``79/100``, not the binary expansion of 0.79.
    Strings may be decimals (``"0.8"``) or ratios (``"1/3"``).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, (Decimal, str)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def fmt4(value: Fraction | int) -> str:
    """Fixed 4-place decimal text, round-half-even on the exact value."""
    scaled = round(Fraction(value) * 10000)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10000)
    return f"{sign}{whole}.{frac:04d}"


def rational_to_json(value: Fraction) -> int | float | str:
    """Lossless JSON form: int, exact decimal float, or ``"p/q"`` text."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    text = repr(float(value))
    if Fraction(text) == value:
        return float(text)
    return f"{value.numerator}/{value.denominator}"
