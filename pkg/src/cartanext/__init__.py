"""Exact computations with extensions of symmetric spaces to parabolic geometries.

The layers build on each other: ``exactmath`` (rationals, matrices,
polynomials), ``liealg`` and ``grading`` (matrix Lie algebras and their
gradings), ``sympair`` (symmetric pairs), ``extension`` (extension data,
curvature, morphisms), ``normality`` (the codifferential and its solver),
``catalog`` (parameterized families), ``infaut`` (infinitesimal
automorphisms) and ``cli``.
"""

__version__ = "0.1.0"
