from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plopt.numbers import clamp01, format_number, is_terminating, to_fraction


@pytest.mark.parametrize(
    "text, expected",
    [("0.25", Fraction(1, 4)), ("1/3", Fraction(1, 3)), (" 2 ", Fraction(2)), ("-0.5", Fraction(-1, 2)), (7, Fraction(7))],
)
def test_to_fraction_parses_exact_forms(text, expected):
    assert to_fraction(text) == expected


@pytest.mark.parametrize("bad", [0.1, True, None, [1]])
def test_to_fraction_rejects_inexact_and_foreign_types(bad):
    with pytest.raises(TypeError):
        to_fraction(bad)


@pytest.mark.parametrize("bad", ["abc", "1/0", ""])
def test_to_fraction_rejects_garbage_strings(bad):
    with pytest.raises(ValueError):
        to_fraction(bad)


@pytest.mark.parametrize(
    "q, text",
    [
        (Fraction(1312, 5), "262.4"),
        (Fraction(205, 2), "102.5"),
        (Fraction(250), "250"),
        (Fraction(0), "0"),
        (Fraction(-1, 8), "-0.125"),
        (Fraction(5, 6), "5/6"),
        (Fraction(-1, 3), "-1/3"),
    ],
)
def test_format_number(q, text):
    assert format_number(q) == text


def test_is_terminating():
    assert is_terminating(Fraction(3, 40))
    assert not is_terminating(Fraction(1, 3))


@given(st.fractions())
def test_format_then_parse_is_identity(q):
    assert to_fraction(format_number(q)) == q


def test_clamp01():
    assert clamp01(Fraction(13, 10)) == 1
    assert clamp01(Fraction(-1, 10)) == 0
    assert clamp01(Fraction(1, 2)) == Fraction(1, 2)
