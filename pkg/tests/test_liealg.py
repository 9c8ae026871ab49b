from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartanext.exactmath import Mat, mat_commutator
from cartanext.liealg import AlgebraError, BasisAlgebra, NotClosedError, centralizer_fixed_space

from support import CATALOGED_ALGEBRAS, graded

# Killing form as a multiple of the trace form tr(XY) of the defining real matrices
TRACE_FACTOR = {
    "sl(3,R)": 6,
    "sl(4,R)": 8,
    "sl(5,R)": 10,
    "so(4,1)": 3,
    "so(3,2)": 3,
    "su(2,1)": 3,
    "su(3,2)": 5,
    "sp(4,R)": 6,
    "sp(6,R)": 8,
    "sl(2,H)": 4,
}


def _alg(name):
    family, params = CATALOGED_ALGEBRAS[name]
    return graded(family, **params).alg


@pytest.mark.parametrize("name", sorted(TRACE_FACTOR))
def test_killing_form_is_a_trace_form(name):
    alg = _alg(name)
    lam = TRACE_FACTOR[name]
    kill = alg.killing
    for i in range(alg.dim):
        for j in range(i, alg.dim):
            assert kill[i, j] == lam * (alg.basis[i] @ alg.basis[j]).trace()


@pytest.mark.parametrize("name", ["sl(3,R)", "su(2,1)", "sp(4,R)"])
def test_killing_from_adjoint_matrices(name):
    # trace(ad x ad y), with ad assembled from commutators of the matrices
    alg = _alg(name)
    ads = []
    for x in alg.basis:
        cols = [alg.coords(mat_commutator(x, b)) for b in alg.basis]
        ads.append(Mat([[cols[j][i] for j in range(alg.dim)] for i in range(alg.dim)]))
    for i in range(alg.dim):
        for j in range(alg.dim):
            assert alg.killing[i, j] == (ads[i] @ ads[j]).trace()


@pytest.mark.parametrize("name", ["sl(3,R)", "so(4,1)", "su(2,1)", "sp(4,R)"])
def test_jacobi_and_semisimplicity(name):
    alg = _alg(name)
    assert alg.jacobi_defect() == []
    assert alg.is_semisimple()


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_bracket_matches_matrix_commutator(data):
    alg = _alg("su(2,1)")
    coeff = st.lists(st.fractions(-3, 3, max_denominator=4), min_size=alg.dim, max_size=alg.dim)
    u, v = data.draw(coeff), data.draw(coeff)
    assert alg.element(alg.bracket(u, v)) == mat_commutator(alg.element(u), alg.element(v))
    w = data.draw(coeff)
    # ad-invariance B([u,v],w) = B(u,[v,w])
    assert alg.killing_form(alg.bracket(u, v), w) == alg.killing_form(u, alg.bracket(v, w))


def test_non_closed_span_is_rejected():
    with pytest.raises(NotClosedError):
        BasisAlgebra([Mat.unit(2, 0, 1), Mat.unit(2, 1, 0)])


def test_dependent_basis_is_rejected():
    with pytest.raises(AlgebraError):
        BasisAlgebra([Mat.unit(2, 0, 1), Mat.unit(2, 0, 1).scale(2)])


def test_coords_strictness():
    alg = BasisAlgebra([Mat.unit(2, 0, 1)])
    assert alg.coords(Mat.unit(2, 0, 1).scale(F(3, 2))) == [F(3, 2)]
    assert alg.coords(Mat.unit(2, 1, 0), strict=False) is None
    with pytest.raises(AlgebraError):
        alg.coords(Mat.unit(2, 1, 0))


def test_involution_eigenspaces_of_sl2():
    alg = _alg("sl(3,R)")
    h0 = Mat.diag([-1, 1, 1])
    plus, minus = centralizer_fixed_space(alg, h0)
    assert len(plus) + len(minus) == alg.dim
    assert (len(plus), len(minus)) == (4, 4)
