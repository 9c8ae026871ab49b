from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartanext.catalog import get_family, solve_family
from cartanext.exactmath import Mat, mat_commutator
from cartanext.extension import (
    Extension,
    ExtensionError,
    affine_split,
    apply_morphism,
    canonical_affine_extension,
    cayley,
    compose,
    curvature,
    curvature_pair,
    exp_nilpotent,
    filtration_preserving,
    identity_extension,
    is_flat,
    is_regular,
    is_torsion_free,
    random_isotropy_automorphism,
    random_parabolic_element,
    require_valid,
    validate,
)
from cartanext.normality import is_normal
from cartanext.sympair import build_pair

from support import graded, random_sample, seeded

# cheap families for randomized covariance checks
COVARIANCE_FAMILIES = ["dim3-sl3", "dim3-su21", "dim3-sp4", "lagrangean-pgl", "cr-psu", "cr-orthogonal", "conformal"]


def _numeric(e):
    return [[x.constant_value() for x in row] for row in e.alpha]


def _kappa_matrix(e, a, b):
    """[alpha(e_a), alpha(e_b)] - alpha([e_a, e_b]) assembled from target matrices."""
    src, tgt = e.source_alg, e.target.alg
    alpha = _numeric(e)
    am = [tgt.element(row) for row in alpha]
    br = src.coords(mat_commutator(src.basis[a], src.basis[b]))
    image = Mat.zeros(tgt.size)
    for k, c in enumerate(br):
        if c:
            image = image + am[k].scale(c)
    return mat_commutator(am[a], am[b]) - image


def test_identity_extension_is_flat_and_normal():
    e = identity_extension(graded("lagrangean", n=1))
    require_valid(e)
    assert is_flat(e) and is_regular(e) and is_torsion_free(e) and is_normal(e)


def test_affine_extension_of_sphere_is_torsion_free_and_curved():
    pair = build_pair("so(3)/so(2)")
    e = canonical_affine_extension(pair)
    assert validate(e).ok
    torsion, curv = affine_split(curvature(e), e)
    assert torsion.is_zero()
    assert not curv.is_zero()


def test_curvature_matches_matrix_commutators():
    e = solve_family(get_family("dim3-sl3")).extension
    for a in e.frame:
        for b in e.frame:
            u = [F(int(i == a)) for i in range(e.dim_source)]
            v = [F(int(i == b)) for i in range(e.dim_source)]
            got = [x.constant_value() for x in curvature_pair(e, u, v)]
            assert e.target.alg.element(got) == _kappa_matrix(e, a, b)


def test_broken_equivariance_is_reported_with_axiom():
    e = solve_family(get_family("dim3-sl3")).extension
    k = e.frame[1]
    rows = list(e.alpha)
    # a degree-zero shift of an odd frame image breaks equivariance under the symmetry
    g = e.target
    shift = [F(0)] * g.dim
    shift[g.indices(0)[-1]] = F(1)
    rows[k] = tuple(x + s for x, s in zip(rows[k], shift))
    broken = Extension(e.source_alg, e.isotropy, e.frame, e.target, tuple(rows), h0=e.h0, i_h0=e.i_h0)
    report = validate(broken)
    assert not report.ok
    with pytest.raises(ExtensionError) as info:
        require_valid(broken)
    assert info.value.axiom == report.failures()[0].name


def test_image_outside_target_is_rejected():
    e = solve_family(get_family("dim3-sl3")).extension
    images = [e.target.alg.element(r) for r in _numeric(e)]
    images[0] = Mat.identity(images[0].rows)
    with pytest.raises(ExtensionError) as info:
        Extension.from_images(e.source_alg, e.isotropy, e.frame, e.target, images)
    assert info.value.axiom == "alpha_in_target"


def test_compose_with_identity_changes_nothing():
    e = solve_family(get_family("lagrangean-pgl")).extension
    both = compose(e, identity_extension(e.target))
    assert both.alpha == e.alpha


def test_cayley_and_exp_stay_in_group():
    g = graded("contact-projective", n=1)
    form = g.form
    x = g.alg.element([F(1, 5) if k == g.indices(0)[0] else F(0) for k in range(g.dim)])
    c = cayley(x)
    assert c.T() @ form @ c == form
    n = g.alg.element([F(1) if g.degree[k] > 0 else F(0) for k in range(g.dim)])
    assert exp_nilpotent(n).T() @ form @ exp_nilpotent(n) == form


def test_morphism_rejects_elements_outside_p():
    e = solve_family(get_family("dim3-sl3")).extension
    g = e.target
    lower = exp_nilpotent(g.alg.element([F(1) if d < 0 else F(0) for d in g.degree]))
    assert not filtration_preserving(g, lower)
    with pytest.raises(ExtensionError) as info:
        apply_morphism(e, lower)
    assert info.value.axiom == "morphism"


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(COVARIANCE_FAMILIES), st.integers(0, 10**6))
def test_morphisms_transport_curvature(family_id, seed):
    rng = seeded(seed)
    spec = get_family(family_id)
    e = solve_family(spec, random_sample(spec, rng)).extension
    p0 = random_parabolic_element(e.target, rng)
    s, sigma = random_isotropy_automorphism(e, rng)
    moved = apply_morphism(e, p0, sigma_element=s)
    assert validate(moved).ok
    for flag in (is_flat, is_torsion_free, is_regular, is_normal):
        assert flag(moved) == flag(e)
    inv = p0.inverse()
    n = e.dim_source
    for a in moved.frame:
        for b in moved.frame:
            # kappa_hat(e_a, e_b) = p0^-1 kappa(sigma e_a, sigma e_b) p0
            u = [sigma[i, a] for i in range(n)]
            v = [sigma[i, b] for i in range(n)]
            k = e.target.alg.element([x.constant_value() for x in curvature_pair(e, u, v)])
            assert _kappa_matrix(moved, a, b) == inv @ k @ p0
