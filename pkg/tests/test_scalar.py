from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbit_designs.scalar import (MP, FieldMismatchError, Quad, SurdSum, exact_sqrt, format_scalar,
                                  from_sympy, is_zero, parse_scalar, precision, scalar_mode,
                                  set_precision, sign, sqrt_rational, to_mpf, to_sympy, tolerance)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)
fields = st.sampled_from([2, 3, 5, 6, 7])


def test_quad_collapses_to_rational():
    q = Quad(Fraction(3, 2), 0, 5)
    assert q == Fraction(3, 2)
    s = Quad(0, 1, 5)
    assert s * s == 5
    assert isinstance(s * s, Fraction)


def test_mixing_fields_is_an_error():
    with pytest.raises(FieldMismatchError):
        Quad(0, 1, 2) + Quad(0, 1, 3)


def test_quad_rejects_non_squarefree():
    with pytest.raises(ValueError):
        Quad(1, 1, 8)


def test_sqrt_rational():
    assert sqrt_rational(Fraction(9, 4)) == Fraction(3, 2)
    r = sqrt_rational(Fraction(8, 5))
    assert r * r == Fraction(8, 5)
    with pytest.raises(ValueError):
        sqrt_rational(-1)


def test_exact_sqrt_in_field():
    # (1 + sqrt(5))^2 = 6 + 2 sqrt(5)
    x = Quad(6, 2, 5)
    assert exact_sqrt(x) == Quad(1, 1, 5)
    assert exact_sqrt(Fraction(2)) is None


def test_parse_and_format_roundtrip():
    for text in ("27/25", "1+2*sqrt(5)", "-sqrt(3)", "3/2-1/2*sqrt(7)"):
        x = parse_scalar(text)
        assert parse_scalar(format_scalar(x)) == x
    assert scalar_mode(parse_scalar("1/3")) == "rational"
    assert scalar_mode(parse_scalar("sqrt(2)")) == "quadratic"
    assert scalar_mode(parse_scalar("sqrt(2)+sqrt(3)")) == "bigfloat"


def test_sympy_roundtrip():
    for x in (Fraction(7, 3), Quad(1, Fraction(2, 3), 11)):
        assert from_sympy(to_sympy(x)) == x


def test_precision_and_tolerance():
    old = precision()
    try:
        set_precision(128)
        assert tolerance() == MP.mpf(2) ** -64
        set_precision(128, 100)
        assert tolerance() == MP.mpf(2) ** -100
    finally:
        set_precision(old)
    with pytest.raises(ValueError):
        set_precision(32)


def test_bigfloat_zero_test():
    assert is_zero(MP.mpf(2) ** -200)
    assert not is_zero(MP.mpf(2) ** -100)
    assert sign(MP.mpf(-1)) == -1


def test_surd_sum_exact_zero():
    s = SurdSum()
    s.add(Fraction(1), 8)
    s.add(Fraction(-2), 2)
    assert s.is_zero()
    s.add(Fraction(1), 3)
    assert not s.is_zero()


@given(rationals, rationals, rationals, rationals, fields)
def test_quad_field_axioms(a, b, c, e, d):
    x, y = Quad(a, b, d), Quad(c, e, d)
    assert x + y - y == x
    assert (x * y) == (y * x)
    if x != 0:
        assert x * x.inverse() == 1
        assert (y / x) * x == y


@given(rationals, rationals, fields)
def test_quad_matches_float(a, b, d):
    x = Quad(a, b, d)
    v = to_mpf(a) + to_mpf(b) * MP.sqrt(d)
    assert abs(to_mpf(x) - v) < MP.mpf(10) ** -60
    assert sign(x) == (0 if x == 0 else (1 if v > 0 else -1))
