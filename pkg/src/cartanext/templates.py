"""Symbolic block templates for extension families.

A template turns each source basis matrix into a target matrix whose entries
are polynomials in the family's parameters.  Templates are linear in the
source matrix, so evaluating them on basis matrices gives alpha on the basis.
Entries fixed by the target's invariant form can be left as ``None`` and
filled by :func:`complete_by_form`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactmath import Mat, PolyExpr, PolyMat, solve_linear, to_rational
from .extension import ExtensionError, presolve_linear, template_equations
from .grading import GradedAlgebra, build_graded, contact_omega
from .liealg import AlgebraError
from .sympair import SymmetricPair, build_pair

ZERO = PolyExpr.const(0)
ONE = PolyExpr.const(1)


def var(name: str) -> PolyExpr:
    return PolyExpr.var(name)


# ---------------------------------------------------------------------------
# complex polynomials


class CPoly:
    """re + i*im with polynomial parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = PolyExpr.lift(re)
        self.im = PolyExpr.lift(im)

    @classmethod
    def lift(cls, x) -> "CPoly":
        return x if isinstance(x, CPoly) else cls(x, 0)

    def __add__(self, other) -> "CPoly":
        o = CPoly.lift(other)
        return CPoly(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "CPoly":
        return CPoly(-self.re, -self.im)

    def __sub__(self, other) -> "CPoly":
        return self + (-CPoly.lift(other))

    def __rsub__(self, other) -> "CPoly":
        return CPoly.lift(other) - self

    def __mul__(self, other) -> "CPoly":
        o = CPoly.lift(other)
        return CPoly(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "CPoly":
        return CPoly(self.re, -self.im)

    def norm2(self) -> PolyExpr:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()


I_UNIT = CPoly(0, 1)


def cvar(name: str) -> CPoly:
    """Complex unknown with real parts ``{name}r`` and ``{name}i``."""
    return CPoly(var(name + "r"), var(name + "i"))


# ---------------------------------------------------------------------------
# assembling block matrices


def blocks_to_entries(rows: Sequence[Sequence], sizes: Sequence[int]) -> List[List]:
    """Flatten a block layout; each block is a scalar-like value, a list of
    lists, or ``None`` (to be completed later)."""
    total = sum(sizes)
    out: List[List] = [[None] * total for _ in range(total)]
    r0 = 0
    for bi, rs in enumerate(sizes):
        c0 = 0
        for bj, cs in enumerate(sizes):
            blk = rows[bi][bj]
            for i in range(rs):
                for j in range(cs):
                    if blk is None:
                        val = None
                    elif isinstance(blk, (list, tuple)):
                        val = blk[i][j]
                    else:
                        val = blk
                    out[r0 + i][c0 + j] = val
            c0 += cs
        r0 += rs
    return out


def complete_by_form(entries: List[List], form: Mat, complex_entries: bool) -> List[List]:
    """Fill ``None`` entries so that A^* F + F A = 0 for a signed permutation F."""
    n = len(entries)
    finv = form.inverse()
    out = [row[:] for row in entries]
    for r in range(n):
        for c in range(n):
            if out[r][c] is not None:
                continue
            # A = -F^-1 A^* F
            acc = CPoly() if complex_entries else ZERO
            for i in range(n):
                fi = finv[r, i]
                if not fi:
                    continue
                for j in range(n):
                    fj = form[j, c]
                    if not fj:
                        continue
                    src = entries[j][i]
                    if src is None:
                        raise ExtensionError("template", f"entry ({r},{c}) depends on another missing entry")
                    val = CPoly.lift(src).conj() if complex_entries else PolyExpr.lift(src)
                    acc = acc - val * (fi * fj)
            out[r][c] = acc
    return out


def real_polymat(entries: Sequence[Sequence]) -> PolyMat:
    return PolyMat([[PolyExpr.lift(x) for x in row] for row in entries])


def complex_polymat(entries: Sequence[Sequence]) -> PolyMat:
    """Realify complex entries as 2x2 blocks [[re, -im], [im, re]]."""
    n = len(entries)
    out = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for i, row in enumerate(entries):
        for j, x in enumerate(row):
            z = CPoly.lift(x)
            out[2 * i][2 * j] = z.re
            out[2 * i][2 * j + 1] = -z.im
            out[2 * i + 1][2 * j] = z.im
            out[2 * i + 1][2 * j + 1] = z.re
    return PolyMat(out)


def complex_entry(m: Mat, r: int, c: int) -> CPoly:
    return CPoly(m[2 * r, 2 * c], m[2 * r + 1, 2 * c])


def scale_vec(v: Sequence, s) -> List:
    return [x * s for x in v]


def add_vec(*vs: Sequence) -> List:
    out = list(vs[0])
    for v in vs[1:]:
        out = [a + b for a, b in zip(out, v)]
    return out


def column(v: Sequence) -> List[List]:
    return [[x] for x in v]


def row(v: Sequence) -> List[List]:
    return [list(v)]


def diag_block(n: int, value) -> List[List]:
    return [[value if i == j else ZERO for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# blueprints


@dataclass
class Blueprint:
    """Everything needed to turn a template into an :class:`Extension`."""

    pair: SymmetricPair
    target: GradedAlgebra
    isotropy: Tuple[int, ...]
    frame: Tuple[int, ...]
    images: List[PolyMat]
    h0: Optional[Mat]
    i_h0: Optional[Mat]
    contact: bool
    solve_names: Tuple[str, ...] = ()
    product_names: Tuple[str, ...] = ()
    aux_names: Tuple[str, ...] = ()
    extra_equations: List[PolyExpr] = field(default_factory=list)
    notes: Tuple[str, ...] = ()


def resolve_aux(bp: Blueprint) -> Tuple[List[PolyMat], Dict[str, PolyExpr], List[str]]:
    """Presolve membership/equivariance equations for the auxiliary unknowns.

    Returns the substituted images, the assignments, and the auxiliary
    unknowns left free (they become additional solve-names).
    """
    eqs = template_equations(bp.pair.alg, bp.isotropy, bp.target, bp.images, bp.h0, bp.i_h0)
    eqs = eqs + [q for q in bp.extra_equations if not q.is_zero()]
    aux = set(bp.aux_names)
    stray = [q for q in eqs if q.variables() - aux]
    if stray:
        raise ExtensionError(
            "template", "template violates the target structure or equivariance for its unknowns", tuple(map(str, stray[:3]))
        )
    assign, free = presolve_linear(eqs, bp.aux_names)
    images = [m.subs(assign) for m in bp.images]
    used = set()
    for m in images:
        used |= m.variables()
    return images, assign, [u for u in free if u in used]


# ---------------------------------------------------------------------------
# source decompositions


def orthogonal_pair(c: int, p: int, q: int) -> SymmetricPair:
    return build_pair("so(p+2,q)" if c == 1 else "so(p+1,q+1)", p=p, q=q)


def _orth_parts(m: Mat, n: int):
    a = m[0, 1]
    x = [m[2 + i, 0] for i in range(n)]
    y = [m[2 + i, 1] for i in range(n)]
    amat = [[m[2 + i, 2 + j] for j in range(n)] for i in range(n)]
    return a, x, y, amat


def _sl_parts(m: Mat, n: int):
    a = m[0, 0]
    y = [m[0, 1 + i] for i in range(n)]
    x = [m[1 + i, 0] for i in range(n)]
    amat = [[m[1 + i, 1 + j] for j in range(n)] for i in range(n)]
    return a, x, y, amat


def _ad_on_m(pair: SymmetricPair, k: int, frame: Sequence[int]) -> List[List[Fraction]]:
    """Matrix of ad(e_k) restricted to the frame directions."""
    alg = pair.alg
    units = alg.unit_vectors()
    cols = []
    for j in frame:
        br = alg.bracket(units[k], units[j])
        if any(br[i] for i in range(alg.dim) if i not in frame):
            raise AlgebraError("isotropy element does not preserve the frame span")
        cols.append([br[i] for i in frame])
    return [[cols[j][i] for j in range(len(frame))] for i in range(len(frame))]


def _signs(p: int, q: int) -> List[int]:
    return [1] * p + [-1] * q


# ---------------------------------------------------------------------------
# AHS templates


def _matrix_unknowns(prefix: str, n: int) -> List[List[PolyExpr]]:
    return [[var(f"{prefix}{i + 1}_{j + 1}") for j in range(n)] for i in range(n)]


def projective_blueprint(pair: SymmetricPair) -> Blueprint:
    """alpha(h + X) = [[-k tr A, (b2 X)^T], [X, A - k tr(A) E]] with A = ad(h)|m."""
    m_idx = pair.frame_indices(contact=False)
    iso = tuple(i for i in range(pair.dim) if i not in m_idx)
    n = len(m_idx)
    target = build_graded("projective", n=n)
    b2 = _matrix_unknowns("B", n)
    k = var("k")
    pos = {idx: p for p, idx in enumerate(m_idx)}
    images = []
    for idx in range(pair.dim):
        if idx in pos:
            x = [ONE if i == pos[idx] else ZERO for i in range(n)]
            bx = [sum((b2[i][j] * x[j] for j in range(n)), ZERO) for i in range(n)]
            ent = blocks_to_entries([[ZERO, row(bx)], [column(x), ZERO]], (1, n))
        else:
            a = _ad_on_m(pair, idx, m_idx)
            tr = sum((a[i][i] for i in range(n)), Fraction(0))
            blk = [[PolyExpr.const(a[i][j]) - (k * tr if i == j else ZERO) for j in range(n)] for i in range(n)]
            ent = blocks_to_entries([[-k * tr, ZERO], [ZERO, blk]], (1, n))
        images.append(real_polymat(ent))
    aux = tuple(f"B{i + 1}_{j + 1}" for i in range(n) for j in range(n)) + ("k",)
    return Blueprint(pair, target, iso, tuple(m_idx), images, pair.h0, target.sigma_element(), False, aux_names=aux)


def killing_signs_on_m(pair: SymmetricPair) -> List[int]:
    """Signs of the Killing form on the m basis (checked diagonal, equal size)."""
    kill = pair.alg.killing
    m_idx = pair.frame_indices(contact=False)
    vals = []
    for a in m_idx:
        for b in m_idx:
            if a != b and kill[a, b]:
                raise AlgebraError("m basis is not Killing-orthogonal")
        vals.append(kill[a, a])
    mags = {abs(v) for v in vals}
    if len(mags) != 1 or 0 in mags:
        raise AlgebraError("m basis vectors have unequal Killing norms")
    # overall sign is irrelevant for a conformal class; keep more plus signs first
    signs = [1 if v > 0 else -1 for v in vals]
    return signs


def conformal_blueprint(pair: SymmetricPair) -> Blueprint:
    """alpha(h + X) = [[0, (b2 X)^T, 0], [X, A, -I b2 X], [0, -X^T I, 0]]."""
    m_idx = pair.frame_indices(contact=False)
    iso = tuple(i for i in range(pair.dim) if i not in m_idx)
    n = len(m_idx)
    signs = killing_signs_on_m(pair)
    target = build_graded("conformal", signs=tuple(signs))
    b2 = _matrix_unknowns("B", n)
    pos = {idx: p for p, idx in enumerate(m_idx)}
    images = []
    for idx in range(pair.dim):
        if idx in pos:
            x = [ONE if i == pos[idx] else ZERO for i in range(n)]
            bx = [sum((b2[i][j] * x[j] for j in range(n)), ZERO) for i in range(n)]
            ent = blocks_to_entries(
                [
                    [ZERO, row(bx), ZERO],
                    [column(x), ZERO, column([-bx[i] * signs[i] for i in range(n)])],
                    [ZERO, row([-x[i] * signs[i] for i in range(n)]), ZERO],
                ],
                (1, n, 1),
            )
        else:
            a = _ad_on_m(pair, idx, m_idx)
            ent = blocks_to_entries([[ZERO, ZERO, ZERO], [ZERO, a, ZERO], [ZERO, ZERO, ZERO]], (1, n, 1))
        images.append(real_polymat(ent))
    aux = tuple(f"B{i + 1}_{j + 1}" for i in range(n) for j in range(n))
    return Blueprint(pair, target, iso, tuple(m_idx), images, pair.h0, target.sigma_element(), False, aux_names=aux)


def inclusion_blueprint(pair: SymmetricPair, target: GradedAlgebra) -> Blueprint:
    """alpha = the defining inclusion of the source matrices into the target."""
    for b in pair.alg.basis:
        if not target.alg.contains(b):
            raise ExtensionError("alpha_in_target", "source algebra is not contained in the target")
    m_idx = pair.frame_indices(contact=False)
    iso = tuple(i for i in range(pair.dim) if i not in m_idx)
    images = [PolyMat.from_mat(b) for b in pair.alg.basis]
    return Blueprint(pair, target, iso, tuple(m_idx), images, pair.h0, target.sigma_element(), False)


# ---------------------------------------------------------------------------
# contact templates over the reals


def _contact_split(pair: SymmetricPair):
    frame = pair.frame_indices(contact=True)
    iso = tuple(i for i in range(pair.dim) if i not in frame)
    return iso, tuple(frame)


def lagrangean_orthogonal_blueprint(
    c: int, p: int, q: int, b: Sequence[Fraction], names: Dict[str, str]
) -> Blueprint:
    """Orthogonal source into sl(n+2) with the (1, n, 1) contact grading.

    (a, X, Y, A) -> [[c1 a, d1 X^T I + d2 Y^T I, e1 a],
                     [b1 X + b2 Y, A + (c2 a / n) E, d3 X + d4 Y],
                     [delta a, b3 X^T I + b4 Y^T I, -(c1 + c2) a]]
    ``names`` renames c1, c2, d1..d4, e1.
    """
    n = p + q
    pair = orthogonal_pair(c, p, q)
    target = build_graded("lagrangean", n=n)
    sg = _signs(p, q)
    b1, b2, b3, b4 = (to_rational(x) for x in b)
    delta = b1 * b4 - b2 * b3
    v = {k: var(names.get(k, k)) for k in ("c1", "c2", "d1", "d2", "d3", "d4", "e1")}
    images = []
    for mat in pair.alg.basis:
        a, x, y, amat = _orth_parts(mat, n)
        xi = [x[i] * sg[i] for i in range(n)]
        yi = [y[i] * sg[i] for i in range(n)]
        top = [v["d1"] * xi[i] + v["d2"] * yi[i] for i in range(n)]
        left = [PolyExpr.const(b1 * x[i] + b2 * y[i]) for i in range(n)]
        right = [v["d3"] * x[i] + v["d4"] * y[i] for i in range(n)]
        bottom = [PolyExpr.const(b3 * xi[i] + b4 * yi[i]) for i in range(n)]
        mid = [[PolyExpr.const(amat[i][j]) + (v["c2"] * (a / n) if i == j else ZERO) for j in range(n)] for i in range(n)]
        ent = blocks_to_entries(
            [
                [v["c1"] * a, row(top), v["e1"] * a],
                [column(left), mid, column(right)],
                [PolyExpr.const(delta * a), row(bottom), -(v["c1"] + v["c2"]) * a],
            ],
            (1, n, 1),
        )
        images.append(real_polymat(ent))
    iso, frame = _contact_split(pair)
    solve = tuple(names.get(k, k) for k in ("c1", "c2", "d1", "d2", "d3", "d4", "e1"))
    return Blueprint(
        pair, target, iso, frame, images, pair.h0, target.sigma_element(), True, solve, (names.get("e1", "e1"),)
    )


def lagrangean_pgl_blueprint(n: int, b1: Fraction, b2: Fraction) -> Blueprint:
    """sl(n+1) with l = gl(n) into sl(n+2).

    [[a, Y^T], [X, A]] -> [[c1 a, d1 Y^T, e1 a], [b1 X, A + (c2/n) E a, d2 X],
                           [b1 b2 a, b2 Y^T, (1 - c1 - c2) a]]
    """
    pair = build_pair("sl(n+1)", n=n)
    target = build_graded("lagrangean", n=n)
    b1, b2 = to_rational(b1), to_rational(b2)
    c1, c2, d1, d2, e1 = (var(s) for s in ("c1", "c2", "d1", "d2", "e1"))
    images = []
    for mat in pair.alg.basis:
        a, x, y, amat = _sl_parts(mat, n)
        mid = [[PolyExpr.const(amat[i][j]) + (c2 * (a / n) if i == j else ZERO) for j in range(n)] for i in range(n)]
        ent = blocks_to_entries(
            [
                [c1 * a, row([d1 * yy for yy in y]), e1 * a],
                [column([PolyExpr.const(b1 * xx) for xx in x]), mid, column([d2 * xx for xx in x])],
                [PolyExpr.const(b1 * b2 * a), row([PolyExpr.const(b2 * yy) for yy in y]), (ONE - c1 - c2) * a],
            ],
            (1, n, 1),
        )
        images.append(real_polymat(ent))
    iso, frame = _contact_split(pair)
    return Blueprint(
        pair, target, iso, frame, images, pair.h0, target.sigma_element(), True, ("c1", "c2", "d1", "d2", "e1"), ("e1",)
    )


def contact_projective_orthogonal_blueprint(
    c: int, p: int, q: int, b: Sequence[Fraction], names: Dict[str, str]
) -> Blueprint:
    """Orthogonal source into sp(2n+2) with the (1, 2n, 1) contact grading.

    (a, X1, X2, A) -> [[c1 a, *, *, e1 a],
                       [b1 X1 + b2 X2, A + c2 a E, g a I, d3 X1 + d4 X2],
                       [b3 I X1 + b4 I X2, h a I, I A I - c2 a E, -d1 I X1 - d2 I X2],
                       [2 delta a, *, *, -c1 a]]
    Starred entries follow from the symplectic form.
    """
    n = p + q
    pair = orthogonal_pair(c, p, q)
    target = build_graded("contact-projective", n=n)
    sg = _signs(p, q)
    b1, b2, b3, b4 = (to_rational(x) for x in b)
    delta = b1 * b4 - b2 * b3
    keys = ("c1", "c2", "g", "h", "d1", "d2", "d3", "d4", "e1")
    v = {k: var(names.get(k, k)) for k in keys}
    images = []
    for mat in pair.alg.basis:
        a, x1, x2, amat = _orth_parts(mat, n)
        col1 = [PolyExpr.const(b1 * x1[i] + b2 * x2[i]) for i in range(n)]
        col2 = [PolyExpr.const(sg[i] * (b3 * x1[i] + b4 * x2[i])) for i in range(n)]
        right1 = [v["d3"] * x1[i] + v["d4"] * x2[i] for i in range(n)]
        right2 = [-(v["d1"] * x1[i] + v["d2"] * x2[i]) * sg[i] for i in range(n)]
        p11 = [[PolyExpr.const(amat[i][j]) + (v["c2"] * a if i == j else ZERO) for j in range(n)] for i in range(n)]
        p12 = [[v["g"] * (a * sg[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
        p21 = [[v["h"] * (a * sg[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
        p22 = [[PolyExpr.const(sg[i] * amat[i][j] * sg[j]) - (v["c2"] * a if i == j else ZERO) for j in range(n)] for i in range(n)]
        ent = blocks_to_entries(
            [
                [v["c1"] * a, None, None, v["e1"] * a],
                [column(col1), p11, p12, column(right1)],
                [column(col2), p21, p22, column(right2)],
                [PolyExpr.const(2 * delta * a), None, None, -v["c1"] * a],
            ],
            (1, n, n, 1),
        )
        ent = complete_by_form(ent, target.form, complex_entries=False)
        images.append(real_polymat(ent))
    iso, frame = _contact_split(pair)
    solve = tuple(names.get(k, k) for k in keys)
    return Blueprint(
        pair, target, iso, frame, images, pair.h0, target.sigma_element(), True, solve, (names.get("e1", "e1"),)
    )


# ---------------------------------------------------------------------------
# CR templates


def cr_psu_blueprint(p: int, q: int, b: CPoly) -> Blueprint:
    """su(p+1,q) with l = u(p,q) into su(p+1,q+1).

    [[a, -conj(X)^T I], [X, A]] -> [[c a, *, e a], [b X, A + ((1 - 2 Re c)/n) E a, d X],
                                    [|b|^2 a, *, conj(c) a]]
    """
    n = p + q
    pair = build_pair("su(p+1,q)", p=p, q=q)
    target = build_graded("cr", p=p, q=q)
    c, d, e = cvar("c"), cvar("d"), var("e")
    images = []
    for mat in pair.alg.basis:
        a = complex_entry(mat, 0, 0)
        x = [complex_entry(mat, 1 + i, 0) for i in range(n)]
        amat = [[complex_entry(mat, 1 + i, 1 + j) for j in range(n)] for i in range(n)]
        shift = (ONE - c.re * 2) / n
        mid = [[amat[i][j] + (a * shift if i == j else CPoly()) for j in range(n)] for i in range(n)]
        ent = blocks_to_entries(
            [
                [c * a, None, a * e],
                [column([b * xx for xx in x]), mid, column([d * xx for xx in x])],
                [a * b.norm2(), None, c.conj() * a],
            ],
            (1, n, 1),
        )
        ent = complete_by_form(ent, target.form, complex_entries=True)
        images.append(complex_polymat(ent))
    iso, frame = _contact_split(pair)
    return Blueprint(
        pair, target, iso, frame, images, pair.h0, _complex_sigma(target), True, ("cr", "ci", "dr", "di", "e"), ("e",)
    )


def _complex_sigma(target: GradedAlgebra) -> Mat:
    return target.sigma_element()


def cr_orthogonal_blueprint(c: int, p: int, q: int, b1: CPoly, b2: CPoly) -> Blueprint:
    """Orthogonal source into su(p+1,q+1) via X = X1 + i X2.

    (a, X1, X2, A) -> [[c1 a, *, e1 a i],
                       [b1 X - b2 i conj(X), A - (2 Im c1 / n) E a i, d1 X - d2 i conj(X)],
                       [2(|b1|^2 - |b2|^2) a i, *, -conj(c1) a]]
    """
    n = p + q
    pair = orthogonal_pair(c, p, q)
    target = build_graded("cr", p=p, q=q)
    c1, d1, d2, e1 = cvar("c1"), cvar("d1"), cvar("d2"), var("e1")
    scale = (b1.norm2() - b2.norm2()) * 2
    images = []
    for mat in pair.alg.basis:
        a, x1, x2, amat = _orth_parts(mat, n)
        xs = [CPoly(x1[i], x2[i]) for i in range(n)]
        left = [b1 * z - b2 * I_UNIT * z.conj() for z in xs]
        right = [d1 * z - d2 * I_UNIT * z.conj() for z in xs]
        shift = I_UNIT * (c1.im * (-2 * a) / n)
        mid = [[CPoly(amat[i][j]) + (shift if i == j else CPoly()) for j in range(n)] for i in range(n)]
        ent = blocks_to_entries(
            [
                [c1 * a, None, I_UNIT * (e1 * a)],
                [column(left), mid, column(right)],
                [I_UNIT * (scale * a), None, -(c1.conj() * a)],
            ],
            (1, n, 1),
        )
        ent = complete_by_form(ent, target.form, complex_entries=True)
        images.append(complex_polymat(ent))
    iso, frame = _contact_split(pair)
    solve = ("c1r", "c1i", "d1r", "d1i", "d2r", "d2i", "e1")
    return Blueprint(pair, target, iso, frame, images, pair.h0, target.sigma_element(), True, solve, ("e1",))


def dim3_su21_blueprint(c: int, b: Sequence[Fraction]) -> Blueprint:
    """Three-dimensional source into su(2,1) with real coefficients.

    (e, x1, x2) -> [[a1 e + a2 e i, *, c1 e i],
                    [(b1 x1 + b2 x2) + (b3 x1 + b4 x2) i, -2 a2 e i, (d1 x1 + d2 x2) + (d3 x1 + d4 x2) i],
                    [2 delta e i, *, -a1 e + a2 e i]]
    """
    pair = orthogonal_pair(c, 1, 0)
    target = build_graded("cr", p=1, q=0)
    b1, b2, b3, b4 = (to_rational(x) for x in b)
    delta = b1 * b4 - b2 * b3
    a1, a2, c1, d1, d2, d3, d4 = (var(s) for s in ("a1", "a2", "c1", "d1", "d2", "d3", "d4"))
    images = []
    for mat in pair.alg.basis:
        e, x, y, _ = _orth_parts(mat, 1)
        x1, x2 = x[0], y[0]
        ent = blocks_to_entries(
            [
                [CPoly(a1 * e, a2 * e), None, CPoly(0, c1 * e)],
                [CPoly(b1 * x1 + b2 * x2, b3 * x1 + b4 * x2), CPoly(0, a2 * (-2 * e)), CPoly(d1 * x1 + d2 * x2, d3 * x1 + d4 * x2)],
                [CPoly(0, 2 * delta * e), None, CPoly(-a1 * e, a2 * e)],
            ],
            (1, 1, 1),
        )
        ent = complete_by_form(ent, target.form, complex_entries=True)
        images.append(complex_polymat(ent))
    iso, frame = _contact_split(pair)
    return Blueprint(
        pair, target, iso, frame, images, pair.h0, target.sigma_element(), True,
        ("a1", "a2", "c1", "d1", "d2", "d3", "d4"),
    )


# ---------------------------------------------------------------------------
# generic contact builder


def intertwining_isotropy(pair: SymmetricPair, target: GradedAlgebra, frame_m: Sequence[int], minus: Mat) -> Dict[int, List[Fraction]]:
    """For each isotropy basis vector h, the g_0 element Z with
    [Z, M x] = M [h, x] on m, where M maps m coordinates to g_-1 coordinates."""
    g0 = target.indices(0)
    m1 = target.indices(-1)
    alg = target.alg
    units = alg.unit_vectors()
    out = {}
    iso = [i for i in range(pair.dim) if i not in frame_m and (pair.line is None or pair.line[i] == 0)]
    for k in iso:
        adm = _ad_on_m(pair, k, frame_m)
        rows, rhs = [], []
        for col in range(len(frame_m)):
            mx = [Fraction(0)] * alg.dim
            for r, idx in enumerate(m1):
                mx[idx] = minus[r, col]
            target_vec = [Fraction(0)] * alg.dim
            for r, idx in enumerate(m1):
                target_vec[idx] = sum((minus[r, j] * adm[j][col] for j in range(len(frame_m))), Fraction(0))
            brs = [alg.bracket(units[z], mx) for z in g0]
            for i in range(alg.dim):
                rows.append([br[i] for br in brs])
                rhs.append(target_vec[i])
        sol = solve_linear(rows, rhs)
        if sol is None:
            raise ExtensionError("equivariance_isotropy", "no g_0 element intertwines the chosen frame", (k,))
        z = [Fraction(0)] * alg.dim
        for s, idx in zip(sol, g0):
            z[idx] = s
        out[k] = z
    return out


def generic_contact_blueprint(pair: SymmetricPair, target: GradedAlgebra, minus: Mat, prefix: str = "u") -> Blueprint:
    """Extension with a prescribed g_-1 part on m and everything else unknown.

    The isotropy image is the intertwining g_0 element; the line gets
    unknown g_-2, g_0 and g_2 components, each m vector unknown g_1
    components.  The g_-2 coefficient is fixed by requiring kappa to have no
    g_-2 component on m x m.
    """
    iso, frame = _contact_split(pair)
    frame_m = frame[1:]
    line_idx = frame[0]
    z = intertwining_isotropy(pair, target, frame_m, minus)
    alg = target.alg
    m1 = target.indices(-1)
    top = target.indices(-2)
    if len(top) != 1:
        raise ExtensionError("template", "generic contact builder needs a contact grading")
    images: List[PolyMat] = []
    aux: List[str] = []
    coords_rows: Dict[int, List[PolyExpr]] = {}
    for k in range(pair.dim):
        vec = [ZERO] * alg.dim
        if k in z:
            vec = [PolyExpr.const(x) for x in z[k]]
        elif k == line_idx:
            for j in range(alg.dim):
                if target.degree[j] in (-2, 0, 2):
                    name = f"{prefix}{k}_{j}"
                    vec[j] = var(name)
                    aux.append(name)
        else:
            col = frame_m.index(k)
            for r, idx in enumerate(m1):
                vec[idx] = PolyExpr.const(minus[r, col])
            for j in range(alg.dim):
                if target.degree[j] == 1:
                    name = f"{prefix}{k}_{j}"
                    vec[j] = var(name)
                    aux.append(name)
        coords_rows[k] = vec
        images.append(alg.poly_element(vec))
    # lowest-degree torsion on m x m
    extra = []
    units = pair.alg.unit_vectors()
    t = top[0]
    for i, a in enumerate(frame_m):
        for b in frame_m[i + 1:]:
            br_t = alg.bracket(coords_rows[a], coords_rows[b])[t]
            src = pair.alg.bracket(units[a], units[b])
            rhs = ZERO
            for s, coef in enumerate(src):
                if coef:
                    rhs = rhs + coords_rows[s][t] * coef
            extra.append(br_t - rhs)
    return Blueprint(
        pair, target, iso, frame, images, pair.h0, target.sigma_element(), True,
        aux_names=tuple(aux), extra_equations=extra,
    )


# ---------------------------------------------------------------------------
# so*(2n+2) sources


def _sostar_vectors(pair: SymmetricPair) -> List[List[CPoly]]:
    """Column-0 vector (complex, length 2n, corner rows dropped) of each m basis element."""
    n = pair.params["n"]
    m = n + 1
    rows = [r for r in range(2 * m) if r % m != 0]
    out = []
    for k in pair.frame_indices(contact=False):
        mat = pair.alg.basis[k]
        out.append([complex_entry(mat, r, 0) for r in rows])
    return out


def _quaternion_action(v: List[CPoly], b: Sequence[Fraction], n: int) -> List[CPoly]:
    """v -> (b1 + i b2) v + (b3 + i b4) J conj(v), J = [[0, -E], [E, 0]]."""
    z1 = CPoly(b[0], b[1])
    z2 = CPoly(b[2], b[3])
    jv = [-(v[n + i].conj()) for i in range(n)] + [v[i].conj() for i in range(n)]
    return [z1 * x + z2 * y for x, y in zip(v, jv)]


def _minus_matrix(target: GradedAlgebra, images: Sequence[PolyMat]) -> Mat:
    """g_-1 coordinates (columns) of target matrices that must lie in g_-1."""
    m1 = target.indices(-1)
    cols = []
    for img in images:
        coords = target.alg.coords(img.eval({}))
        if coords is None or any(coords[i] for i in range(target.dim) if i not in m1):
            raise ExtensionError("template", "identification does not land in g_-1")
        cols.append([coords[i] for i in m1])
    return Mat([[cols[j][i] for j in range(len(cols))] for i in range(len(m1))])


def sostar_cr_target(n: int) -> GradedAlgebra:
    e = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    middle = Mat([[(-e[i % n][j % n] if (i < n) != (j < n) else 0) for j in range(2 * n)] for i in range(2 * n)])
    return build_graded("cr", middle=middle)


def sostar_cr_blueprint(n: int, b: Sequence[Fraction]) -> Blueprint:
    """so*(2n+2) into su(n+1,n+1): g_-1 part v -> (b.v)_upper, i (b.v)_lower."""
    pair = build_pair("so*(2n+2)", n=n)
    target = sostar_cr_target(n)
    b = [to_rational(x) for x in b]
    imgs = []
    for v in _sostar_vectors(pair):
        w = _quaternion_action(v, b, n)
        w = w[:n] + [I_UNIT * x for x in w[n:]]
        size = 2 * n + 2
        ent = [[CPoly() for _ in range(size)] for _ in range(size)]
        for r, x in enumerate(w):
            ent[r + 1][0] = x
            ent[size - 1][r + 1] = None
        ent = complete_by_form(ent, target.form, complex_entries=True)
        imgs.append(complex_polymat(ent))
    return generic_contact_blueprint(pair, target, _minus_matrix(target, imgs))


def _darboux(omega: Mat) -> Mat:
    """Columns e_1..e_k, f_1..f_k with omega(e_i, f_j) = delta_ij (rational)."""
    size = omega.rows
    form = lambda u, v: sum((u[i] * omega[i, j] * v[j] for i in range(size) for j in range(size) if omega[i, j]), Fraction(0))
    rest = [[Fraction(int(i == j)) for i in range(size)] for j in range(size)]
    es, fs = [], []
    while rest:
        e = rest.pop(0)
        k = next((i for i, f in enumerate(rest) if form(e, f)), None)
        if k is None:
            raise AlgebraError("form is degenerate")
        f = rest.pop(k)
        s = form(e, f)
        f = [x / s for x in f]
        es.append(e)
        fs.append(f)
        rest = [
            [w[i] - form(w, f) * e[i] + form(w, e) * f[i] for i in range(size)]
            for w in rest
        ]
    cols = es + fs
    return Mat([[cols[j][i] for j in range(size)] for i in range(size)])


def sostar_ctproj_blueprint(n: int, b: Sequence[Fraction]) -> Blueprint:
    """so*(2n+2) into sp(4n+2): a Darboux identification of m with g_-1,
    precomposed with the quaternionic multiple b."""
    pair = build_pair("so*(2n+2)", n=n)
    target = build_graded("contact-projective", n=2 * n)
    b = [to_rational(x) for x in b]
    frame_m = pair.frame_indices(contact=False)
    line_idx = pair.line.index(1)
    units = pair.alg.unit_vectors()
    omega_m = Mat([[pair.alg.bracket(units[i], units[j])[line_idx] for j in frame_m] for i in frame_m])
    omega_t = contact_omega(target)
    base = _darboux(omega_t) @ _darboux(omega_m).inverse()
    # quaternionic multiple in m coordinates
    vecs = _sostar_vectors(pair)
    real = lambda v: [y for x in v for y in (x.re.constant_value(), x.im.constant_value())]
    vmat = Mat([[real(v)[i] for v in vecs] for i in range(4 * n)])
    act = Mat([[real(_quaternion_action(v, b, n))[i] for v in vecs] for i in range(4 * n)])
    mult = vmat.inverse() @ act
    return generic_contact_blueprint(pair, target, base @ mult)
