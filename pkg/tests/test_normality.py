from fractions import Fraction as F

import pytest

from cartanext.catalog import get_family, instantiate, solve_family
from cartanext.extension import ExtensionError
from cartanext.normality import (
    NormalityError,
    codiff_of,
    contact_normality_check,
    is_normal,
    normality_equations,
    solve_normality,
)

CONTACT_FAMILIES = ["dim3-sl3", "dim3-su21", "dim3-sp4", "lagrangean-pgl", "lagrangean-orthogonal", "cr-psu", "cr-orthogonal", "ctproj-orthogonal"]


@pytest.mark.parametrize("c", [1, -1])
def test_projective_solution_is_unique(c):
    e = instantiate(get_family("projective"), {"c": c})
    sol = solve_normality(e)
    assert sol.free == [] and sol.verified
    assert all(x.is_zero() for row in codiff_of(e.substitute(sol.assignments)) for x in row)


def test_inconsistent_system_raises():
    e = instantiate(get_family("projective"))
    with pytest.raises(NormalityError):
        solve_normality(e, values={"B2_1": 1})


def test_equations_vanish_on_the_solution():
    e = instantiate(get_family("lagrangean-orthogonal"))
    sol = solve_normality(e, prefer_free=("c1",))
    for q in normality_equations(e):
        assert q.subs(sol.assignments).is_zero()


@pytest.mark.parametrize("family_id", CONTACT_FAMILIES)
def test_contact_shortcut_agrees_with_codifferential(family_id):
    solved = solve_family(get_family(family_id))
    assert is_normal(solved.extension)
    assert contact_normality_check(solved.extension)
    # move one solved value off the solution: both routes must notice or the shape breaks
    for name in sorted(solved.values):
        vals = dict(solved.values)
        vals[name] = vals[name] + 1
        bad = solved.template.substitute(vals)
        full = is_normal(bad)
        try:
            short = contact_normality_check(bad)
        except ExtensionError as exc:
            assert exc.axiom == "contact_shape"
            continue
        assert short == full


def test_contact_shortcut_needs_contact_target():
    e = solve_family(get_family("conformal")).extension
    with pytest.raises(ExtensionError):
        contact_normality_check(e)


def test_solution_reports_equation_count_and_free_names():
    e = instantiate(get_family("lagrangean-pgl"), {"n": 2, "b1": F(2), "b2": F(3)})
    sol = solve_normality(e, prefer_free=("c1",))
    assert sol.free == ["c1"] and sol.equation_count > 0 and sol.consistent
