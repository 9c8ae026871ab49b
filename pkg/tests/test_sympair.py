import pytest

from cartanext.exactmath import Mat, rank
from cartanext.liealg import in_span
from cartanext.sympair import (
    PAIR_IDS,
    build_pair,
    contact_reduce,
    is_effective,
    killing_signature_on_m,
    load_grading_table,
    load_pair_table,
)

# (pair id, params, dim k, dim h, Killing signature on m)
# signatures: m is R^2 (x) R^(p,q) or its analogues; Killing is negative on compact directions
CASES = [
    ("so(p+2,q)", {"p": 2, "q": 1}, 10, 4, (2, 4)),
    ("so(p+1,q+1)", {"p": 2, "q": 1}, 10, 4, (3, 3)),
    ("su(p+1,q)", {"p": 1, "q": 1}, 8, 4, (2, 2)),
    ("sl(n+1)", {"n": 2}, 8, 4, (2, 2)),
    ("so*(2n+2)", {"n": 1}, 6, 2, (2, 2)),
    ("so*(2n+2)", {"n": 2}, 15, 7, (4, 4)),
    ("so(3)/so(2)", {}, 3, 1, (0, 2)),
    ("so(2,1)/so(1,1)", {}, 3, 1, (1, 1)),
]


@pytest.mark.parametrize("pid,params,dk,dh,sig", CASES)
def test_pair_structure(pid, params, dk, dh, sig):
    pair = build_pair(pid, **params)
    alg = pair.alg
    assert (pair.dim, len(pair.h_span)) == (dk, dh)
    assert len(pair.m_span) == dk - dh
    assert pair.h0 @ pair.h0 == Mat.identity(pair.h0.rows)
    # symmetric-pair bracket relations
    for x in pair.h_span:
        for y in pair.m_span:
            assert in_span(pair.m_span, alg.bracket(x, y))
    for x in pair.m_span:
        for y in pair.m_span:
            assert in_span(pair.h_span, alg.bracket(x, y))
    assert killing_signature_on_m(pair) == sig
    assert is_effective(pair)


@pytest.mark.parametrize("pid,params", [(c[0], c[1]) for c in CASES])
def test_contact_reduction_is_nondegenerate(pid, params):
    red = contact_reduce(build_pair(pid, **params))
    assert red.bracket_to_line.rank() == len(red.m_span)
    assert rank(red.h_span + [red.line]) == len(red.h_span) + 1


def test_pair_ids_and_errors():
    assert len(PAIR_IDS) == 7
    with pytest.raises(ValueError):
        build_pair("e6/f4")


def test_bundled_tables_load():
    pairs = load_pair_table()
    assert pairs["schema"] == 1 and pairs["pairs"]
    assert all({"k", "h", "signature", "rederived"} <= set(p) for p in pairs["pairs"])
    built = sorted(p["built"] for p in pairs["pairs"] if p["rederived"])
    # the two rank-one pairs are special cases of the so(p+2,q) and so(p+1,q+1) rows
    assert set(built) == {c[0] for c in CASES} - {"so(3)/so(2)", "so(2,1)/so(1,1)"}
    gradings = load_grading_table()
    assert gradings["schema"] == 1
