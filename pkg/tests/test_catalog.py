from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartanext import jsonio
from cartanext.catalog import (
    SampleError,
    canonical_reduce,
    complete_sample,
    equivalent_under_morphism,
    export_family_table,
    get_family,
    instantiate,
    list_families,
    load_family_table,
    morphism_grid,
    closed_form_checks,
    parse_sample,
    solve_family,
)
from cartanext.extension import curvature, is_flat, is_regular, is_torsion_free, validate
from cartanext.grading import GRADED_FAMILIES
from cartanext.normality import is_normal
from cartanext.sympair import PAIR_IDS

from support import random_sample, seeded

FAMILY_IDS = [f.family_id for f in list_families()]

# closed-form entries whose printed value differs from the computed one at the default samples
SUSPECTED_TYPOS = {
    "lagrangean-orthogonal": ["alpha.canonical.d2"],
    "cr-psu": ["normality.c_bd.im"],
    "cr-orthogonal": ["alpha.canonical.c1i", "alpha.canonical.d1r", "alpha.canonical.d2i"],
}


def test_family_ids():
    assert len(FAMILY_IDS) == 14
    assert len(set(FAMILY_IDS)) == 14


@pytest.mark.parametrize("family_id", FAMILY_IDS)
def test_family_names_pairs_and_grading(family_id):
    spec = get_family(family_id)
    assert spec.pair_ids and set(spec.pair_ids) <= set(PAIR_IDS)
    assert spec.grading in GRADED_FAMILIES


def test_bundled_table_matches_the_code():
    assert load_family_table() == jsonio.loads(jsonio.dumps(export_family_table()))
    assert [f["id"] for f in load_family_table()["families"]] == FAMILY_IDS


def test_unknown_family():
    with pytest.raises(KeyError):
        get_family("g2")


@pytest.mark.parametrize("family_id", FAMILY_IDS)
def test_random_samples_validate(family_id):
    spec = get_family(family_id)
    rng = seeded(hash(family_id) % 1000)
    for _ in range(5):
        s = random_sample(spec, rng)
        assert validate(instantiate(spec, s)).ok


@pytest.mark.parametrize(
    "family_id,sample,constraint",
    [
        ("lagrangean-orthogonal", {"b1": 1, "b2": 1, "b3": 1, "b4": 1}, "delta_nonzero"),
        ("lagrangean-orthogonal", {"zz": 1}, "unknown_parameter"),
        ("lagrangean-pgl", {"n": F(3, 2)}, "integer"),
        ("cr-orthogonal", {"c": 2}, "c_sign"),
        ("conformal", {"p": -1}, "nonnegative"),
        ("cr-orthogonal", {"b1r": 1, "b1i": 0, "b2r": 0, "b2i": 1}, "norms_differ"),
    ],
)
def test_inadmissible_samples_name_the_constraint(family_id, sample, constraint):
    with pytest.raises(SampleError) as info:
        complete_sample(get_family(family_id), sample)
    assert info.value.constraint == constraint


def test_parse_sample():
    assert parse_sample(["b1=1/2", "c = -1"]) == {"b1": F(1, 2), "c": F(-1)}
    for bad in (["b1"], ["=1"], ["b1=0.5"]):
        with pytest.raises(SampleError) as info:
            parse_sample(bad)
        assert info.value.constraint == "syntax"


@pytest.mark.parametrize("family_id", [f for f in FAMILY_IDS if get_family(f).flat_sample is not None])
def test_declared_flat_samples_are_flat(family_id):
    spec = get_family(family_id)
    e = solve_family(spec, dict(spec.flat_sample)).extension
    assert is_flat(e) and is_normal(e)


@pytest.mark.parametrize("family_id", FAMILY_IDS)
def test_solved_defaults_are_normal_regular_torsion_free(family_id):
    e = solve_family(get_family(family_id)).extension
    assert not e.variables()
    assert is_normal(e) and is_regular(e) and is_torsion_free(e)


@pytest.mark.parametrize("family_id", FAMILY_IDS)
def test_closed_form_mismatches_are_the_recorded_ones(family_id):
    solved = solve_family(get_family(family_id))
    bad = [c.entry for c in closed_form_checks(solved) if not c.match]
    assert bad == SUSPECTED_TYPOS.get(family_id, [])


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 1), (1, 2), (3, 0)]))
def test_lagrangean_flat_exactly_when_gamma_vanishes(seed, pq):
    spec = get_family("lagrangean-orthogonal")
    rng = seeded(seed)
    s = random_sample(spec, rng)
    s.update(p=F(pq[0]), q=F(pq[1]))
    gamma = s["c"] * s["b1"] * s["b3"] + s["b2"] * s["b4"]
    assert is_flat(solve_family(spec, s).extension) == (gamma == 0)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_dim3_sl3_flat_on_case_c(seed):
    # b1^2 = b2^2 and b3^2 = b4^2 with delta != 0
    rng = seeded(seed)
    u, v = rng.choice([1, 2, F(1, 2), 3]), rng.choice([1, 2, F(1, 3)])
    s1, s2, c = rng.choice([1, -1]), rng.choice([1, -1]), rng.choice([1, -1])
    sample = {"c": c, "b1": u, "b2": s1 * u, "b3": v, "b4": s2 * v}
    spec = get_family("dim3-sl3")
    try:
        complete_sample(spec, sample)
    except SampleError:
        return
    assert is_flat(solve_family(spec, sample).extension)


def test_sp4_family_is_flat():
    spec = get_family("dim3-sp4")
    rng = seeded(4)
    for _ in range(4):
        assert is_flat(solve_family(spec, random_sample(spec, rng)).extension)


def test_sostar_cr_flat_at_t_zero():
    spec = get_family("cr-sostar")
    for n in (1, 2):
        s = spec.t_point(complete_sample(spec, {"n": n}), F(0))
        assert is_flat(solve_family(spec, s).extension)


def test_canonical_parameter_lagrangean():
    spec = get_family("lagrangean-orthogonal")
    c = canonical_reduce(spec, {"p": 2, "q": 1, "b1": 1, "b2": 0, "b3": 1, "b4": 1})
    assert c.value == 1 and c.branch == "c=1"
    assert canonical_reduce(spec, {"b1": 1, "b2": 0, "b3": 0, "b4": 1}).value == 0
    # the reduced point carries the same invariant
    c = canonical_reduce(spec, {"b1": 1, "b2": 2, "b3": 1, "b4": 3})
    assert c.value == 7
    assert canonical_reduce(spec, c.point).value == 7


def test_equivalence_with_itself_is_the_identity():
    spec = get_family("dim3-sl3")
    e = solve_family(spec).extension
    w = equivalent_under_morphism(e, e, morphism_grid(spec, complete_sample(spec)))
    assert w is not None
    assert w.p0.rank() == w.p0.rows


def test_sign_of_b3_can_be_flipped():
    spec = get_family("dim3-sl3")
    s1 = complete_sample(spec, {"b1": 1, "b2": 0, "b3": 2, "b4": 1})
    s2 = dict(s1, b3=F(-2))
    e1 = solve_family(spec, s1).extension
    e2 = solve_family(spec, s2).extension
    assert equivalent_under_morphism(e1, e2, morphism_grid(spec, s1)) is not None


def test_distinct_t_values_are_not_equivalent():
    spec = get_family("lagrangean-orthogonal")
    s1 = complete_sample(spec, {"p": 2, "q": 1, "b1": 1, "b2": 0, "b3": 1, "b4": 1})
    s2 = dict(s1, b3=F(2))
    e1 = solve_family(spec, s1).extension
    e2 = solve_family(spec, s2).extension
    assert equivalent_under_morphism(e1, e2, morphism_grid(spec, s1)) is None
    # independent confirmation: the curvature values at matching frames differ
    k1 = sorted((a, b, i, x.constant_value()) for a, b, i, x in curvature(e1).nonzero_entries())
    k2 = sorted((a, b, i, x.constant_value()) for a, b, i, x in curvature(e2).nonzero_entries())
    assert k1 != k2


def test_morphism_grid_only_contains_source_symmetries():
    spec = get_family("lagrangean-orthogonal")
    s = complete_sample(spec, {"c": -1})
    grid = morphism_grid(spec, s)
    assert grid
    alg = instantiate(spec, s).source_alg
    for g in grid:
        inv = g.inverse()
        assert all(alg.contains(g @ b @ inv) for b in alg.basis)
