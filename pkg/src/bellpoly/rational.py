"""Exact rational scalars.

Every probability, Bell coefficient and LP quantity in this package is a
``fractions.Fraction``: arbitrary precision, always in lowest terms with a
positive denominator, exact arithmetic throughout.  Floats are rejected at
every entry point; there is no approximate code path anywhere.

The string form used in files and reports is ``"a/b"`` (or a plain integer
string).  ``parse_rational`` / ``format_rational`` round-trip exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

__all__ = ["Rational", "as_rational", "parse_rational", "format_rational"]

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(-?\d+)\s*)?$")


class RationalParseError(ValueError):
    """A string does not denote an exact rational ("a/b" or integer)."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or an integer string into an exact Fraction.

    This is deliberately stricter than ``Fraction(str)``: decimal points,
    exponents and empty strings are rejected so that file contents are
    unambiguous exact rationals.
    """
    if not isinstance(text, str):
        raise RationalParseError(f"expected a rational string, got {type(text).__name__}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise RationalParseError(f"not a rational 'a/b' or integer string: {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    den = int(m.group(2))
    if den == 0:
        raise RationalParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    """Render a Fraction as ``"a/b"`` (or ``"a"`` for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_rational(value: Union[int, Fraction, str]) -> Fraction:
    """Coerce an exact value (int, Fraction, or rational string) to Fraction.

    Floats (and bools) are rejected: a float argument is almost always a
    rounding bug waiting to corrupt an exact computation.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not an exact rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}: this toolkit is exact end-to-end")
    try:
        # Exact rational types from other libraries (e.g. gmpy2.mpq) expose
        # integer numerator/denominator; accept those.
        return Fraction(value.numerator, value.denominator)  # type: ignore[union-attr]
    except AttributeError:
        raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")
