import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartanext import jsonio
from cartanext.exactmath import Mat, PolyExpr

rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
leaves = st.one_of(rationals, st.integers(-5, 5), st.booleans(), st.none(), st.text(max_size=5))
trees = st.recursive(
    leaves,
    lambda inner: st.one_of(st.lists(inner, max_size=4), st.dictionaries(st.text(max_size=4), inner, max_size=4)),
    max_leaves=12,
)


@settings(max_examples=80, deadline=None)
@given(trees)
def test_round_trip(obj):
    assert jsonio.loads(jsonio.dumps(obj)) == obj


@settings(max_examples=40, deadline=None)
@given(rationals)
def test_rationals_are_string_pairs(x):
    raw = json.loads(jsonio.dumps({"v": x}))
    assert raw == {"v": {"num": str(x.numerator), "den": str(x.denominator)}}


def test_polynomials_round_trip_in_term_order():
    p = PolyExpr.var("t") ** 3 * F(3, 2) + PolyExpr.var("t") * F(3, 2) - PolyExpr.var("s")
    data = jsonio.dumps({"p": p})
    assert jsonio.loads(data)["p"] == p
    assert data == jsonio.dumps({"p": p + PolyExpr.const(0)})


def test_matrices_become_nested_rationals():
    raw = json.loads(jsonio.dumps(Mat([[1, F(1, 2)], [0, -3]])))
    assert raw[0][1] == {"num": "1", "den": "2"}


def test_floats_are_refused():
    with pytest.raises(TypeError):
        jsonio.dumps({"x": 0.5})


def test_key_order_is_insertion_order():
    assert jsonio.dumps({"b": 1, "a": 2}).index(b'"b"') < jsonio.dumps({"b": 1, "a": 2}).index(b'"a"')
    assert jsonio.dumps({}).endswith(b"\n")
