import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorquot.errors import ParseError
from tensorquot.parsing import (
    format_poly,
    format_ratfn,
    format_scalar,
    format_tensor,
    parse_poly,
    parse_ratfn,
    parse_scalar,
    parse_tensor,
)
from tensorquot.polyalg import MPoly, RatFn
from tensorquot.scalar import CycScalar, zeta
from tensorquot.tensor import TensorField

NAMES = ("x1", "x2", "x3")


def test_scalar_literals():
    assert parse_scalar("z^2 - 1/2", 3) == zeta(3, 2) - CycScalar.rational(1, 3) / 2
    assert parse_scalar("(1/2)^-2") == 4
    assert format_scalar(parse_scalar("z^3 + 2", 5)) == "z^3 + 2"
    assert format_scalar(parse_scalar("-3/4")) == "-3/4"


def test_precedence_and_associativity():
    n = ("x", "y")
    assert parse_poly("x + y*x^2", n) == parse_poly("x + (y*(x^2))", n)
    assert parse_poly("2^3^2", n) == MPoly.constant(2, 512)
    assert parse_poly("x - y - x", n) == parse_poly("-y", n)
    assert parse_ratfn("x/y/x", n) == parse_ratfn("1/y", n)
    assert parse_poly("-x^2", n) == parse_poly("-(x^2)", n)


def test_tensor_precedence():
    n = ("v1", "v2")
    a = parse_tensor("(1/v1) * D(v1) & d(v2) + v2 * D(v2) & d(v1)", n)
    assert (a.p, a.q) == (1, 1)
    assert a.coefficient((0,), (1,)) == parse_ratfn("1/v1", n)
    assert a.coefficient((1,), (0,)) == parse_ratfn("v2", n)
    w = parse_tensor("v1 * d(v1)^d(v2)", n)
    assert w == parse_tensor("v1 * d(v1)&d(v2) - v1 * d(v2)&d(v1)", n)


def test_mixed_type_sum_is_rejected():
    with pytest.raises(ParseError):
        parse_tensor("d(v) + D(v)", ("v",))
    n = ("v1", "v2")
    with pytest.raises(ParseError):
        parse_tensor("(1/v1) * D(v1) & d(v2) + v2 * d(v1) & d(v1)", n)


@pytest.mark.parametrize("text,col", [
    ("x1 + * x2", 6),
    ("x1 + (x2", 9),
    ("x1 $ x2", 4),
    ("q + 1", 1),
    ("x1^x2", 3),
    ("", 1),
])
def test_parse_errors_carry_positions(text, col):
    with pytest.raises(ParseError) as info:
        parse_poly(text, NAMES)
    assert info.value.line == 1
    assert info.value.column == col


def test_multiline_error_position():
    with pytest.raises(ParseError) as info:
        parse_tensor("d(x1)\n + (x2 *", NAMES)
    assert (info.value.line, info.value.column) == (2, 9)


def test_reserved_names_and_frames():
    with pytest.raises(ParseError):
        parse_poly("z", ("z",))
    with pytest.raises(ParseError):
        parse_poly("d(x1)", NAMES)
    with pytest.raises(ParseError):
        parse_ratfn("1/(x1 - x1)", NAMES)


def test_canonical_printing_examples():
    n = ("x", "y")
    assert format_poly(parse_poly("y^2 + x*y - 3 + x^3", n), n) == "x^3 + x*y + y^2 - 3"
    assert format_ratfn(parse_ratfn("(x^2 - y^2)/(x + y)^2", n), n) == "(x - y)/(x + y)"
    assert format_ratfn(parse_ratfn("1/(3*u^2)", ("u",)), ("u",)) == "1/3/u^2"
    t = parse_tensor("v^-3 * d(v)&d(v)", ("v",))
    assert format_tensor(t) == "1/v^3 * d(v) & d(v)"


# -- round trips -----------------------------------------------------------------------

coef = st.one_of(st.integers(-5, 5), st.fractions(min_value=-3, max_value=3, max_denominator=4))
expo = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))
polys = st.dictionaries(expo, coef, max_size=5).map(lambda t: MPoly(3, t))


@settings(max_examples=150, deadline=None)
@given(polys)
def test_poly_round_trip(p):
    s = format_poly(p, NAMES)
    assert parse_poly(s, NAMES) == p
    assert format_poly(parse_poly(s, NAMES), NAMES) == s


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_ratfn_round_trip(a, b):
    if b.is_zero():
        return
    h = RatFn(a, b)
    s = format_ratfn(h, NAMES)
    assert parse_ratfn(s, NAMES) == h
    assert format_ratfn(parse_ratfn(s, NAMES), NAMES) == s


def test_cyclotomic_round_trip():
    rng = random.Random(0)
    for _ in range(50):
        c = CycScalar(5, [rng.randint(-2, 2) for _ in range(4)])
        p = MPoly(3, {(1, 0, 0): c, (0, 2, 1): rng.randint(-3, 3) or 1, (0, 0, 0): c * c})
        s = format_poly(p, NAMES)
        assert parse_poly(s, NAMES, 5) == p
        assert format_poly(parse_poly(s, NAMES, 5), NAMES) == s


def random_tensor(rng):
    p, q = rng.randint(0, 2), rng.randint(0, 2)
    terms = {}
    for _ in range(rng.randint(0, 3)):
        up = tuple(rng.randrange(3) for _ in range(p))
        lo = tuple(rng.randrange(3) for _ in range(q))
        num = MPoly(3, {(rng.randint(0, 2), rng.randint(0, 1), 0): rng.randint(-3, 3) or 1,
                        (0, 0, rng.randint(0, 2)): rng.randint(-2, 2)})
        den = MPoly(3, {(rng.randint(0, 2), 0, 1): 1, (0, 1, 0): rng.randint(-2, 2)})
        terms[(up, lo)] = RatFn(num, den)
    return TensorField(p, q, NAMES, terms)


def test_tensor_round_trip():
    rng = random.Random(1)
    for _ in range(200):
        t = random_tensor(rng)
        s = format_tensor(t)
        back = parse_tensor(s, NAMES)
        if t.is_zero():
            assert back.is_zero()
            continue
        assert back == t
        assert format_tensor(back) == s


def test_surrounding_whitespace_is_ignored():
    assert parse_poly("  x1 +\n\tx2 \n", NAMES) == parse_poly("x1 + x2", NAMES)
    assert parse_tensor("d(x1)\n", NAMES) == parse_tensor("d(x1)", NAMES)
