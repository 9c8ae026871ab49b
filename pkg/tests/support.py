"""Shared helpers for the test modules: random admissible samples and algebra lists."""

import random
from fractions import Fraction as F

from cartanext.catalog import SampleError, complete_sample, instantiate
from cartanext.extension import ExtensionError
from cartanext.grading import build_graded
from cartanext.normality import NormalityError

# every algebra the graded families are built on at the smallest useful sizes
CATALOGED_ALGEBRAS = {
    "sl(3,R)": ("projective", {"n": 2}),
    "sl(4,R)": ("lagrangean", {"n": 2}),
    "sl(5,R)": ("lagrangean", {"n": 3}),
    "so(4,1)": ("conformal", {"p": 3, "q": 0}),
    "so(3,2)": ("conformal", {"p": 2, "q": 1}),
    "su(2,1)": ("cr", {"p": 1, "q": 0}),
    "su(3,2)": ("cr", {"p": 2, "q": 1}),
    "sp(4,R)": ("contact-projective", {"n": 1}),
    "sp(6,R)": ("contact-projective", {"n": 2}),
    "sl(2,H)": ("quaternionic", {"n": 1}),
}

GRADINGS = {
    "projective n=2": ("projective", {"n": 2}),
    "conformal (2,1)": ("conformal", {"p": 2, "q": 1}),
    "quaternionic n=1": ("quaternionic", {"n": 1}),
    "para-quaternionic n=1": ("para-quaternionic", {"n": 1}),
    "lagrangean n=2": ("lagrangean", {"n": 2}),
    "cr (1,0)": ("cr", {"p": 1, "q": 0}),
    "contact-projective n=1": ("contact-projective", {"n": 1}),
    "contact-projective n=2": ("contact-projective", {"n": 2}),
}

_GRADED_CACHE = {}


def graded(family, **params):
    key = (family, tuple(sorted(params.items())))
    if key not in _GRADED_CACHE:
        _GRADED_CACHE[key] = build_graded(family, **params)
    return _GRADED_CACHE[key]


def small_rational(rng, scale=3):
    while True:
        num = rng.randint(-scale, scale)
        den = rng.randint(1, 3)
        if num:
            return F(num, den)


def random_sample(spec, rng, tries=50):
    """Random admissible sample: structural sizes kept, fixed names perturbed.

    Samples that the family rejects (constraints, validation or normality)
    are redrawn.
    """
    base = complete_sample(spec)
    for _ in range(tries):
        s = dict(base)
        for name in spec.fixed_names:
            s[name] = small_rational(rng) if rng.random() < 0.85 else F(0)
        if "c" in s:
            s["c"] = F(rng.choice((1, -1)))
        try:
            complete_sample(spec, s)
            instantiate(spec, s)
        except (SampleError, ExtensionError, NormalityError):
            continue
        return s
    raise AssertionError(f"no admissible random sample for {spec.family_id}")


def seeded(seed):
    return random.Random(seed)
