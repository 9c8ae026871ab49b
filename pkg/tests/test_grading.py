import pytest

from cartanext.exactmath import Mat
from cartanext.grading import GRADED_FAMILIES, build_graded, contact_omega, grading_invariant_report, sigma_involution

from support import GRADINGS, graded

# (dim g, dims of g_-k .. g_k)
EXPECTED_DIMS = {
    "projective n=2": (8, (2, 4, 2)),
    "conformal (2,1)": (10, (3, 4, 3)),
    "quaternionic n=1": (15, (4, 7, 4)),
    "para-quaternionic n=1": (8, (2, 4, 2)),
    "lagrangean n=2": (15, (1, 4, 5, 4, 1)),
    "cr (1,0)": (8, (1, 2, 2, 2, 1)),
    "contact-projective n=1": (10, (1, 2, 4, 2, 1)),
    "contact-projective n=2": (21, (1, 4, 11, 4, 1)),
}


@pytest.mark.parametrize("label", sorted(GRADINGS))
def test_dimensions(label):
    family, params = GRADINGS[label]
    g = graded(family, **params)
    assert (g.dim, g.component_dims()) == EXPECTED_DIMS[label]


@pytest.mark.parametrize("label", sorted(GRADINGS))
def test_invariant_report_all_true(label):
    family, params = GRADINGS[label]
    report = grading_invariant_report(graded(family, **params))
    assert report and all(report.values()), report


@pytest.mark.parametrize("label", sorted(GRADINGS))
def test_dual_bases_pair_to_identity(label):
    family, params = GRADINGS[label]
    g = graded(family, **params)
    d = g.duals
    kill = g.alg.killing_form
    for a, x in enumerate(d.minus_basis):
        for b, z in enumerate(d.plus_basis):
            assert kill(x, z) == (1 if a == b else 0)


@pytest.mark.parametrize("label", sorted(GRADINGS))
def test_sigma_element_realizes_sigma_involution(label):
    family, params = GRADINGS[label]
    g = graded(family, **params)
    s = g.sigma_element()
    inv = s.inverse()
    sig = sigma_involution(g)
    for j, b in enumerate(g.alg.basis):
        assert g.alg.coords(s @ b @ inv) == [sig[i, j] for i in range(g.dim)]


def test_contact_form_is_nondegenerate():
    g = graded("contact-projective", n=2)
    omega = contact_omega(g)
    assert omega.rank() == omega.rows == 4
    assert omega.T() == omega.scale(-1)


def test_unknown_family_and_bad_sizes():
    with pytest.raises(ValueError):
        build_graded("g2-contact", n=1)
    with pytest.raises(ValueError):
        build_graded("projective", n=0)
    with pytest.raises(ValueError):
        build_graded("conformal", p=0, q=0)


def test_grading_element_acts_by_degree():
    g = graded("lagrangean", n=2)
    ad = g.alg.ad_matrix(g.grading_element)
    assert ad == Mat.diag(g.degree)


def test_family_list():
    assert set(GRADED_FAMILIES) == {"projective", "conformal", "quaternionic", "para-quaternionic", "lagrangean", "cr", "contact-projective"}
