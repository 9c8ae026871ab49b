"""Infinitesimal automorphisms of the homogeneous geometry induced by an extension.

An infinitesimal automorphism is determined by its value X in g at the base
point.  Writing Phi(X, Y) = [X, Y] - kappa(X, Y), the value must satisfy the
zeroth-order integrability condition C(Y1, Y2) X = 0 for all Y1, Y2, and the
space of admissible values must be stable under X -> Phi(X, alpha(Z)) for
every Z in the source algebra.  The iteration below computes the largest
such subspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .exactmath import Mat, nullspace, rank, row_space_basis, solve_linear
from .extension import Extension, ExtensionError, curvature, transport_to_gp

__all__ = ["ClosureError", "InfAutSpace", "infinitesimal_automorphisms", "inf_bracket", "integrability_map"]

Vec = List[Fraction]


class _Geometry:
    """Numeric data of an extension needed by the recursion."""

    def __init__(self, e: Extension):
        if e.variables():
            raise ExtensionError("numeric", "extension still has unknowns: " + ", ".join(sorted(e.variables())))
        self.e = e
        g = e.target
        self.g = g
        self.dim = g.dim
        self.alpha = [[x.constant_value() for x in row] for row in e.alpha]
        phi = transport_to_gp(curvature(e), e)
        self.minus = list(phi.minus)
        pos = {idx: p for p, idx in enumerate(self.minus)}
        self.kappa: Dict[Tuple[int, int], Vec] = {}
        for a in self.minus:
            for b in self.minus:
                v = [x.constant_value() for x in phi(pos[a], pos[b])]
                if any(v):
                    self.kappa[(a, b)] = v
        units = g.alg.unit_vectors()
        self.brackets = [[g.alg.bracket(units[i], units[j]) for j in range(self.dim)] for i in range(self.dim)]
        # g_- rows of alpha on the frame, used to split W = alpha(Z) + Y with Y in p
        self.frame = list(e.frame)
        m = Mat([[self.alpha[k][i] for k in self.frame] for i in self.minus])
        self.minus_inv = m.inverse()

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if yj:
                    c = xi * yj
                    for k, v in enumerate(self.brackets[i][j]):
                        if v:
                            out[k] += c * v
        return out

    def kappa_full(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
        out = [Fraction(0)] * self.dim
        for (a, b), v in self.kappa.items():
            c = x[a] * y[b]
            if c:
                for k, vk in enumerate(v):
                    if vk:
                        out[k] += c * vk
        return out

    def phi(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
        return [p - q for p, q in zip(self.bracket(x, y), self.kappa_full(x, y))]

    def parabolic_part(self, w: Sequence[Fraction]) -> Vec:
        """Y in p with w = alpha(Z) + Y for some Z in the frame span."""
        z = self.minus_inv.apply([w[i] for i in self.minus])
        az = [Fraction(0)] * self.dim
        for coef, k in zip(z, self.frame):
            if coef:
                az = [a + coef * b for a, b in zip(az, self.alpha[k])]
        return [a - b for a, b in zip(w, az)]

    def dkappa(self, w: Sequence[Fraction], x1: Sequence[Fraction], x2: Sequence[Fraction]) -> Vec:
        """Derivative of the curvature function along w, evaluated on (x1, x2).

        kappa is constant along alpha(k) and P-equivariant, so only the
        parabolic part Y of w contributes, as -(Y . kappa)(x1, x2).
        """
        y = self.parabolic_part(w)
        if not any(y):
            return [Fraction(0)] * self.dim
        act = [
            p - q - r
            for p, q, r in zip(
                self.bracket(y, self.kappa_full(x1, x2)),
                self.kappa_full(self.bracket(y, x1), x2),
                self.kappa_full(x1, self.bracket(y, x2)),
            )
        ]
        return [-v for v in act]

    def inf_bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
        """Vector-field bracket on base-point values; -alpha(Z) maps to -alpha([Z1, Z2])."""
        return [p - q for p, q in zip(self.kappa_full(x, y), self.bracket(x, y))]

    def condition(self, y1: Sequence[Fraction], y2: Sequence[Fraction], x: Sequence[Fraction]) -> Vec:
        w = [p - q for p, q in zip(self.bracket(y1, y2), self.kappa_full(y1, y2))]
        terms = (
            self.phi(self.phi(x, y1), y2),
            [-v for v in self.dkappa(y1, x, y2)],
            [-v for v in self.phi(self.phi(x, y2), y1)],
            self.dkappa(y2, x, y1),
            [-v for v in self.phi(x, w)],
        )
        return [sum(col, Fraction(0)) for col in zip(*terms)]


def integrability_map(e: Extension, y1: Sequence, y2: Sequence) -> Mat:
    """Matrix of X -> C(Y1, Y2) X in target coordinates."""
    geo = _Geometry(e)
    units = geo.g.alg.unit_vectors()
    cols = [geo.condition(list(y1), list(y2), u) for u in units]
    return Mat([[cols[j][i] for j in range(geo.dim)] for i in range(geo.dim)])


def _restrict(basis: List[Vec], images: List[Vec], dim: int) -> List[Vec]:
    """Vectors v in span(basis) whose image (linear, given on the basis) is zero."""
    if not basis:
        return []
    rows = [[img[i] for img in images] for i in range(len(images[0]))]
    null = nullspace(rows, len(basis))
    out = []
    for coeffs in null:
        v = [Fraction(0)] * dim
        for c, b in zip(coeffs, basis):
            if c:
                v = [p + c * q for p, q in zip(v, b)]
        out.append(v)
    return row_space_basis(out) if out else []


def _membership(basis: List[Vec], dim: int):
    """A map sending a vector to its residual modulo span(basis)."""
    if not basis:
        return lambda v: list(v)
    # complement: linear functionals vanishing on the span
    annihilator = nullspace(basis, dim)

    def residual(v: Sequence[Fraction]) -> Vec:
        return [sum((a * x for a, x in zip(f, v)), Fraction(0)) for f in annihilator]

    return residual


class ClosureError(ValueError):
    """A bracket of two admissible values left the space."""


def _coordinates(basis: List[Vec], v: Sequence[Fraction]) -> Vec:
    sol = solve_linear([[b[i] for b in basis] for i in range(len(v))], list(v))
    if sol is None:
        raise ClosureError("vector is not in the span of the basis")
    return sol


@dataclass
class InfAutSpace:
    """Admissible base-point values of infinitesimal automorphisms.

    ``bracket_table[i][j]`` holds the coordinates of the bracket of basis
    vectors i and j in the same basis.
    """

    basis: List[Vec]
    target_dim: int
    steps: int
    stable: bool
    alpha_k: List[Vec]
    bracket_table: List[List[Vec]]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def contains_alpha_k(self) -> bool:
        return rank(self.basis + self.alpha_k) == len(self.basis)

    @property
    def equals_alpha_k(self) -> bool:
        """Whether the space is exactly alpha(k)."""
        return self.contains_alpha_k and rank(self.alpha_k) == len(self.basis)

    def coordinates(self, v: Sequence) -> Vec:
        return _coordinates(self.basis, [Fraction(x) for x in v])


def infinitesimal_automorphisms(e: Extension, depth: int = 8, with_table: bool = True) -> InfAutSpace:
    """Largest subspace of g satisfying the integrability condition and stable under alpha(k).

    ``depth`` bounds the number of stabilization rounds; ``stable`` reports
    whether the last round changed nothing.  The bracket table is skipped
    when ``with_table`` is false.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    geo = _Geometry(e)
    dim = geo.dim
    units = geo.g.alg.unit_vectors()
    basis: List[Vec] = [list(u) for u in units]
    ys = [geo.alpha[k] for k in geo.frame]
    for i in range(len(ys)):
        for j in range(i + 1, len(ys)):
            if not basis:
                break
            images = [geo.condition(ys[i], ys[j], b) for b in basis]
            basis = _restrict(basis, images, dim)
    moves = [geo.alpha[k] for k in range(e.dim_source)]
    steps = 0
    stable = False
    while steps < depth:
        steps += 1
        residual = _membership(basis, dim)
        new = basis
        for az in moves:
            if not new:
                break
            images = [residual(geo.phi(b, az)) for b in new]
            if any(any(x) for x in images):
                new = _restrict(new, images, dim)
        if len(new) == len(basis):
            stable = True
            break
        basis = new
    table: List[List[Vec]] = []
    if with_table:
        for x in basis:
            table.append([_coordinates(basis, geo.inf_bracket(x, y)) for y in basis])
    return InfAutSpace(basis, dim, steps, stable, [list(a) for a in geo.alpha], table)


def inf_bracket(space: InfAutSpace, e: Extension, x: Sequence, y: Sequence) -> Vec:
    """kappa(x, y) - [x, y] in the coordinates of ``space.basis``.

    Raises ClosureError when x, y or the result lie outside the space.
    """
    geo = _Geometry(e)
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    space.coordinates(x)
    space.coordinates(y)
    return space.coordinates(geo.inf_bracket(x, y))
