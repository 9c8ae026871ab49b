from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cartanext.exactmath import (
    Mat,
    PolyExpr,
    nullspace,
    parse_rational,
    quaternion_left_matrix,
    rank,
    realify,
    rref,
    solve_linear,
    to_rational,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def square(n):
    return st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)


def rect(rows, cols):
    return st.lists(st.lists(rationals, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@pytest.mark.parametrize("text,value", [("3", F(3)), ("-2/6", F(-1, 3)), (" 7/1 ", F(7))])
def test_parse_rational_accepts_integer_fractions(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["0.5", "1e3", "", "1/2/3", "a/b", "2j"])
def test_parse_rational_rejects_inexact_literals(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


def test_floats_are_refused():
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


@settings(max_examples=40, deadline=None)
@given(square(4))
def test_det_and_inverse_agree_with_sympy(rows):
    m = Mat(rows)
    ref = sympy.Matrix(rows)
    assert m.det() == F(str(ref.det()))
    if ref.det() != 0:
        assert m.inverse() @ m == Mat.identity(4)
        assert m.inverse().tolist() == [[F(str(x)) for x in r] for r in ref.inv().tolist()]


@settings(max_examples=40, deadline=None)
@given(rect(3, 5))
def test_rank_and_nullspace_agree_with_sympy(rows):
    ref = sympy.Matrix(rows)
    assert rank(rows) == ref.rank()
    null = nullspace(rows, 5)
    assert len(null) == 5 - ref.rank()
    for v in null:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


@settings(max_examples=40, deadline=None)
@given(rect(4, 4))
def test_rref_pivots_match_sympy(rows):
    red, piv = rref(rows)
    ref, ref_piv = sympy.Matrix(rows).rref()
    assert list(piv) == list(ref_piv)
    assert red[: len(piv)] == [[F(str(x)) for x in ref.row(i)] for i in range(len(piv))]


@settings(max_examples=30, deadline=None)
@given(square(3), st.lists(rationals, min_size=3, max_size=3))
def test_solve_linear_solves_consistent_systems(a, x):
    b = [sum(r[j] * x[j] for j in range(3)) for r in a]
    sol = solve_linear(a, b)
    assert sol is not None
    assert [sum(r[j] * sol[j] for j in range(3)) for r in a] == b


def test_solve_linear_detects_inconsistency():
    assert solve_linear([[1, 1], [2, 2]], [1, 3]) is None


@settings(max_examples=40, deadline=None)
@given(square(3), square(3), square(3))
def test_matrix_product_is_associative(a, b, c):
    a, b, c = Mat(a), Mat(b), Mat(c)
    assert (a @ b) @ c == a @ (b @ c)


def test_realify_complex_is_multiplicative():
    z = realify("C", [[(1, 2), (0, -1)], [(3, 0), (F(1, 2), 1)]])
    w = realify("C", [[(0, 1), (2, 2)], [(1, -1), (0, 0)]])
    # (1+2i, -i; 3, 1/2+i) (i, 2+2i; 1-i, 0) computed by hand
    zw = realify("C", [[(-3, 0), (-2, 6)], [(F(3, 2), F(7, 2)), (6, 6)]])
    assert z @ w == zw


def test_quaternion_left_matrix_respects_ij_equals_k():
    i = quaternion_left_matrix([0, 1, 0, 0])
    j = quaternion_left_matrix([0, 0, 1, 0])
    k = quaternion_left_matrix([0, 0, 0, 1])
    assert i @ j == k
    assert i @ i == Mat.identity(4).scale(-1)


names = st.sampled_from(["x", "y", "z"])
monomial = st.lists(st.tuples(names, st.integers(1, 2)), max_size=2)


@st.composite
def polys(draw):
    p = PolyExpr.const(draw(rationals))
    for _ in range(draw(st.integers(0, 3))):
        term = PolyExpr.const(draw(rationals))
        for n, e in draw(monomial):
            term = term * PolyExpr.var(n) ** e
        p = p + term
    return p


def _to_sympy(p):
    x, y, z = sympy.symbols("x y z")
    env = {"x": x, "y": y, "z": z}
    out = sympy.Integer(0)
    for mono, c in p.sorted_terms():
        t = sympy.Rational(c.numerator, c.denominator)
        for n, e in mono:
            t *= env[n] ** e
        out += t
    return sympy.expand(out)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_polynomial_ring_laws(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p - p == PolyExpr.const(0)
    assert _to_sympy(p * q) == sympy.expand(_to_sympy(p) * _to_sympy(q))


@settings(max_examples=40, deadline=None)
@given(polys(), rationals, rationals, rationals)
def test_substitution_commutes_with_evaluation(p, a, b, c):
    values = {"x": a, "y": b, "z": c}
    assert p.subs({"x": a}).eval({"y": b, "z": c}) == p.eval(values)


def test_linear_part_detects_nonlinear_terms():
    x, y = PolyExpr.var("x"), PolyExpr.var("y")
    coeffs, const = (x * 2 - y + 3).linear_part(["x", "y"])
    assert coeffs == {"x": 2, "y": -1} and const == 3
    assert (x * y).linear_part(["x", "y"]) is None
