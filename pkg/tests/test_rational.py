"""Exact rational parsing and rendering."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellpoly.rational import (
    RationalParseError,
    as_rational,
    format_rational,
    parse_rational,
)


def test_parse_basic():
    assert parse_rational("2/3") == Fraction(2, 3)
    assert parse_rational("-7/2") == Fraction(-7, 2)
    assert parse_rational("5") == Fraction(5)
    assert parse_rational("-0") == Fraction(0)
    assert parse_rational("4/6") == Fraction(2, 3)


def test_parse_whitespace():
    assert parse_rational(" 1 / 2 ") == Fraction(1, 2)


@pytest.mark.parametrize("bad", ["1/0", "0.5", "1e3", "", "a/b", "1/2/3", "--1", None, 1.5])
def test_parse_rejects(bad):
    with pytest.raises(RationalParseError):
        parse_rational(bad)


def test_format():
    assert format_rational(Fraction(2, 3)) == "2/3"
    assert format_rational(Fraction(-1, 4)) == "-1/4"
    assert format_rational(Fraction(7)) == "7"
    assert format_rational(Fraction(0)) == "0"


@given(st.fractions())
def test_round_trip(r):
    assert parse_rational(format_rational(r)) == r


def test_as_rational_exact_inputs():
    assert as_rational(3) == Fraction(3)
    assert as_rational(Fraction(1, 3)) == Fraction(1, 3)
    assert as_rational("9/12") == Fraction(3, 4)


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)


def test_as_rational_accepts_foreign_exact_rationals():
    gmpy2 = pytest.importorskip("gmpy2")
    assert as_rational(gmpy2.mpq(2, 6)) == Fraction(1, 3)
