"""Kostant codifferential of curvature cochains and the normality solver."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .exactmath import PolyExpr, rref
from .extension import Cochain2, Extension, ExtensionError, curvature, transport_to_gp
from .grading import DualBases, GradedAlgebra

__all__ = [
    "Cochain2",
    "NormalityError",
    "NormalitySolution",
    "kostant_codiff",
    "codiff_of",
    "is_normal",
    "normality_equations",
    "solve_normality",
    "contact_normality_check",
]

ZERO = PolyExpr.const(0)


class NormalityError(ValueError):
    """The normality system could not be solved; ``equations`` shows why."""

    def __init__(self, message: str, equations: Sequence[PolyExpr] = ()):
        self.equations = list(equations)
        shown = "; ".join(str(q) for q in self.equations[:3])
        super().__init__(f"{message}: {shown}" if shown else message)


def _add_scaled(acc: List[PolyExpr], vec: Sequence, s) -> List[PolyExpr]:
    return [a + b * s for a, b in zip(acc, vec)]


def kostant_codiff(phi: Cochain2, g: GradedAlgebra, d: DualBases) -> List[List[PolyExpr]]:
    """Values of the codifferential on each g_- basis vector, in target coordinates.

    (d* phi)(X_j) = 2 sum_i [Z_i, phi(X_j, X_i)] - sum_i phi([Z_i, X_j]_-, X_i),
    where [Z_i, X_j] is projected to g_- and phi extended bilinearly.
    """
    alg = g.alg
    minus = list(phi.minus)
    pos = {idx: p for p, idx in enumerate(minus)}
    size = len(minus)
    out = []
    for j in range(size):
        acc = [ZERO] * phi.width
        for i in range(size):
            z = d.plus_basis[i]
            br = alg.bracket(z, phi(j, i))
            acc = _add_scaled(acc, br, 2)
            zx = alg.bracket(z, d.minus_basis[j])
            for idx, c in enumerate(zx):
                if c and idx in pos:
                    acc = _add_scaled(acc, phi(pos[idx], i), -c)
        out.append(acc)
    return out


def codiff_of(e: Extension) -> List[List[PolyExpr]]:
    g = e.target
    return kostant_codiff(transport_to_gp(curvature(e), e), g, g.duals)


def is_normal(e: Extension, values: Optional[Mapping[str, object]] = None) -> bool:
    """Whether the codifferential of the transported curvature vanishes identically."""
    if values:
        e = e.substitute(values)
    return all(x.is_zero() for row in codiff_of(e) for x in row)


def normality_equations(e: Extension) -> List[PolyExpr]:
    """Distinct nonzero coordinates of the codifferential, up to sign."""
    seen = set()
    out = []
    for row in codiff_of(e):
        for x in row:
            if x.is_zero() or x in seen or -x in seen:
                continue
            seen.add(x)
            out.append(x)
    return out


@dataclass
class NormalitySolution:
    assignments: Dict[str, PolyExpr]
    free: List[str]
    consistent: bool = True
    verified: bool = False
    equation_count: int = 0

    def substituted(self, extra: Optional[Mapping[str, object]] = None) -> Dict[str, PolyExpr]:
        """Assignments with extra values (for free parameters) plugged in."""
        out = {k: v.subs(extra or {}) for k, v in self.assignments.items()}
        for k, v in (extra or {}).items():
            out[k] = PolyExpr.lift(v)
        return out


def _assign(assign: Dict[str, PolyExpr], name: str, expr: PolyExpr) -> None:
    for k in assign:
        assign[k] = assign[k].subs({name: expr})
    assign[name] = expr


def _isolated_linear(eq: PolyExpr, name: str) -> Optional[Fraction]:
    """Coefficient c if ``name`` occurs in eq only through the term c*name."""
    coeff = None
    for mono, c in eq.terms.items():
        if any(v == name for v, _ in mono):
            if mono == ((name, 1),):
                coeff = c
            else:
                return None
    return coeff


def solve_normality(
    e: Extension,
    values: Optional[Mapping[str, object]] = None,
    prefer_free: Sequence[str] = (),
) -> NormalitySolution:
    """Solve d* kappa = 0 for the extension's solve-names.

    Linear equations are reduced together (pivots taken in solve-name order,
    with ``prefer_free`` names last so they stay free when possible).  When
    only nonlinear equations remain, an unknown that enters some equation
    only through a constant multiple of itself is solved for, preferring
    the declared product names.  The solution is then checked symbolically.
    """
    if values:
        e = e.substitute(values)
    unknowns = [n for n in e.solve_names if n not in prefer_free] + [n for n in e.solve_names if n in prefer_free]
    equations = normality_equations(e)
    assign: Dict[str, PolyExpr] = {}
    pending = list(equations)
    while True:
        pending = [q.subs(assign) for q in pending]
        pending = [q for q in pending if not q.is_zero()]
        if not pending:
            break
        open_names = [u for u in unknowns if u not in assign]
        linear, rest = [], []
        for q in pending:
            lin = q.linear_part(open_names)
            (linear if lin is not None else rest).append((q, lin))
        if linear:
            index = {u: i for i, u in enumerate(open_names)}
            rows = []
            for q, (coeffs, const) in linear:
                row = [Fraction(0)] * (len(open_names) + 1)
                for name, c in coeffs.items():
                    row[index[name]] = c
                row[-1] = -const
                rows.append(row)
            red, piv = rref(rows)
            if len(open_names) in piv:
                raise NormalityError("normality system is inconsistent", [q for q, _ in linear])
            for r, p in zip(red, piv):
                expr = PolyExpr.const(r[-1])
                for i, u in enumerate(open_names):
                    if i != p and r[i]:
                        expr = expr - PolyExpr.var(u) * r[i]
                _assign(assign, open_names[p], expr)
            continue
        order = [u for u in open_names if u in e.product_names] + [u for u in open_names if u not in e.product_names]
        done = False
        for u in order:
            for q, _ in rest:
                c = _isolated_linear(q, u)
                if c:
                    expr = (PolyExpr.var(u) * c - q) / c
                    _assign(assign, u, expr)
                    done = True
                    break
            if done:
                break
        if not done:
            names = {v for q, _ in rest for v in q.variables()}
            if not names & set(open_names):
                raise NormalityError("normality system is inconsistent", [q for q, _ in rest])
            raise NormalityError("normality system is not of the supported shape", [q for q, _ in rest])
    free = [u for u in unknowns if u not in assign]
    sol = NormalitySolution(assign, free, True, False, len(equations))
    sol.verified = is_normal(e.substitute(assign))
    return sol


def contact_normality_check(e: Extension, values: Optional[Mapping[str, object]] = None) -> bool:
    """Normality for torsion-free contact curvature via two reduced sums.

    sum_i [Z_i, kappa(X, X_i)] = 0 for X in g_-1 and
    sum_i kappa([Z_i, X_top]_-, X_i) = 0 for the degree -2 generator.
    """
    if values:
        e = e.substitute(values)
    g = e.target
    if g.k != 2 or len(g.indices(-2)) != 1:
        raise ExtensionError("contact_shape", "target grading is not a contact grading")
    phi = transport_to_gp(curvature(e), e)
    minus = list(phi.minus)
    pos = {idx: p for p, idx in enumerate(minus)}
    deg = g.degree
    for (i, j), v in phi.values.items():
        di, dj = deg[minus[i]], deg[minus[j]]
        allowed = {(-1, -1): {0, 2}, (-1, -2): {1}, (-2, -1): {1}, (-2, -2): set()}[(di, dj)]
        for k, x in enumerate(v):
            if not x.is_zero() and deg[k] not in allowed:
                raise ExtensionError("contact_shape", "curvature does not have the torsion-free contact shape", (i, j, k))
    d = g.duals
    alg = g.alg
    size = len(minus)
    for j in range(size):
        if deg[minus[j]] != -1:
            continue
        acc = [ZERO] * phi.width
        for i in range(size):
            acc = [a + b for a, b in zip(acc, alg.bracket(d.plus_basis[i], phi(j, i)))]
        if any(not x.is_zero() for x in acc):
            return False
    top = pos[g.indices(-2)[0]]
    acc = [ZERO] * phi.width
    for i in range(size):
        zx = alg.bracket(d.plus_basis[i], d.minus_basis[top])
        for idx, c in enumerate(zx):
            if c and idx in pos:
                acc = _add_scaled(acc, phi(pos[idx], i), c)
    return all(x.is_zero() for x in acc)
