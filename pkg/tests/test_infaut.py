from fractions import Fraction as F

import pytest

from cartanext.catalog import complete_sample, get_family, instantiate, solve_family
from cartanext.extension import ExtensionError, identity_extension
from cartanext.infaut import ClosureError, inf_bracket, infinitesimal_automorphisms, integrability_map
from cartanext.exactmath import rank

from support import graded


def _space(family_id, sample=None, **kw):
    e = solve_family(get_family(family_id), sample).extension
    return e, infinitesimal_automorphisms(e, **kw)


def _t_sample(family_id, t, **base):
    spec = get_family(family_id)
    return spec.t_point(complete_sample(spec, base), F(t))


@pytest.mark.parametrize(
    "family_id,sample,dim",
    [
        ("projective", None, 8),
        ("conformal", None, 6),
        ("dim3-sl3", {"c": -1, "b1": 1, "b2": 1, "b3": -1, "b4": 1}, 8),
        ("dim3-sp4", None, 10),
        ("lagrangean-pgl", {"n": 2}, 15),
        ("lagrangean-pgl", {"n": 3}, 24),
        ("lagrangean-orthogonal", {"b1": 1, "b2": 0, "b3": 0, "b4": 1}, 24),
    ],
)
def test_flat_geometries_have_all_of_g(family_id, sample, dim):
    e, space = _space(family_id, sample)
    assert space.stable
    assert space.dim == e.dim_target == dim


def test_identity_extension_has_all_of_g():
    e = identity_extension(graded("projective", n=2))
    assert infinitesimal_automorphisms(e).dim == 8


@pytest.mark.parametrize(
    "family_id,sample",
    [
        ("lagrangean-orthogonal", {"p": 2, "q": 1, "b1": 1, "b2": 0, "b3": 1, "b4": 1}),
        ("dim3-sl3", None),
        ("dim3-su21", {"b1": 2, "b2": 0, "b3": 0, "b4": F(1, 2)}),
        ("cr-orthogonal", None),
    ],
)
def test_curved_geometries_reduce_to_the_symmetries(family_id, sample):
    e, space = _space(family_id, sample)
    assert space.equals_alpha_k
    assert space.dim == e.dim_source


def test_sostar_cr_smallest_case_at_t_one():
    # expected: only alpha(k) for every t != 0, tested at t = 1 as stated
    sample = _t_sample("cr-sostar", 1, n=1)
    e, space = _space("cr-sostar", sample)
    dims = (space.dim, e.dim_source)
    assert dims == (6, 6), f"infaut dim {dims[0]}, source dim {dims[1]}"
    assert space.equals_alpha_k


@pytest.mark.parametrize("n", [1, 2])
def test_sostar_cr_interior_t_gives_the_symmetries(n):
    sample = _t_sample("cr-sostar", F(4, 5), n=n)
    e, space = _space("cr-sostar", sample)
    assert space.equals_alpha_k


@pytest.mark.parametrize(
    "family_id,sample",
    [("dim3-sl3", None), ("lagrangean-pgl", {"n": 2}), ("cr-psu", None), ("dim3-su21", None)],
)
def test_symmetries_are_always_contained(family_id, sample):
    _, space = _space(family_id, sample)
    assert space.contains_alpha_k
    assert space.dim <= space.target_dim


@pytest.mark.parametrize("family_id,sample", [("dim3-sl3", None), ("lagrangean-pgl", {"n": 2}), ("dim3-sp4", None)])
def test_bracket_table_is_a_lie_algebra(family_id, sample):
    _, space = _space(family_id, sample)
    t = space.bracket_table
    d = space.dim

    def br(u, v):
        out = [F(0)] * d
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                if a and b:
                    out = [o + a * b * x for o, x in zip(out, t[i][j])]
        return out

    units = [[F(int(i == j)) for j in range(d)] for i in range(d)]
    for i in range(d):
        assert t[i][i] == [0] * d
        for j in range(d):
            assert t[i][j] == [-x for x in t[j][i]]
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(j + 1, d):
                total = [
                    a + b + c
                    for a, b, c in zip(
                        br(br(units[i], units[j]), units[k]),
                        br(br(units[j], units[k]), units[i]),
                        br(br(units[k], units[i]), units[j]),
                    )
                ]
                assert not any(total)


def test_flat_bracket_is_the_opposite_algebra():
    e, space = _space("lagrangean-pgl", {"n": 2})
    alg = e.target.alg
    units = alg.unit_vectors()
    for x in units[:6]:
        for y in units:
            got = inf_bracket(space, e, x, y)
            expect = space.coordinates([-v for v in alg.bracket(x, y)])
            assert got == expect


def test_curved_bracket_is_isomorphic_to_the_source():
    # Z -> -alpha(Z) intertwines the source bracket with the induced one
    e, space = _space("lagrangean-orthogonal", {"p": 2, "q": 1, "b1": 1, "b2": 0, "b3": 1, "b4": 1})
    src = e.source_alg
    units = src.unit_vectors()
    alpha = [[x.constant_value() for x in row] for row in e.alpha]

    def image(z):
        out = [F(0)] * e.dim_target
        for c, row in zip(z, alpha):
            if c:
                out = [o - c * r for o, r in zip(out, row)]
        return out

    for a in range(src.dim):
        for b in range(a + 1, src.dim):
            got = inf_bracket(space, e, image(units[a]), image(units[b]))
            assert got == space.coordinates(image(src.bracket(units[a], units[b])))


def test_depth_stability():
    e = solve_family(get_family("dim3-sl3")).extension
    first = infinitesimal_automorphisms(e, with_table=False)
    assert first.stable
    again = infinitesimal_automorphisms(e, depth=first.steps + 1, with_table=False)
    assert again.dim == first.dim
    assert rank(first.basis + again.basis) == first.dim
    shallow = infinitesimal_automorphisms(e, depth=1, with_table=False)
    assert shallow.dim >= first.dim


def test_integrability_map_vanishes_on_the_space():
    e, space = _space("dim3-sl3")
    ys = [[x.constant_value() for x in e.alpha[k]] for k in e.frame]
    m = integrability_map(e, ys[0], ys[1])
    for v in space.basis:
        assert not any(m.apply(v))


def test_errors():
    e, space = _space("dim3-sl3")
    with pytest.raises(ValueError):
        infinitesimal_automorphisms(e, depth=0)
    outside = next(u for u in e.target.alg.unit_vectors() if rank(space.basis + [u]) > space.dim)
    with pytest.raises(ClosureError):
        inf_bracket(space, e, outside, space.basis[0])
    with pytest.raises(ExtensionError):
        infinitesimal_automorphisms(instantiate(get_family("dim3-sl3")))
