"""Extensions (i, alpha) of homogeneous pairs into graded matrix Lie algebras.

An extension is stored through coordinates: ``alpha[k]`` is the image of the
k-th source basis vector written in the target basis, with polynomial entries
in the parameters that are still unknown.  Fixed parameters are already
substituted.  The source basis splits into the isotropy indices (the Lie
algebra h, mapped into the parabolic) and the frame indices (a complement,
listed with the central line first for contact sources).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exactmath import Mat, PolyExpr, PolyMat, rref
from .grading import GradedAlgebra, sigma_involution
from .liealg import AlgebraError, BasisAlgebra
from .sympair import SymmetricPair

__all__ = [
    "Extension",
    "ExtensionError",
    "Check",
    "ValidationReport",
    "Curv2",
    "Cochain2",
    "validate",
    "curvature",
    "curvature_pair",
    "transport_to_gp",
    "is_flat",
    "is_torsion_free",
    "is_regular",
    "compose",
    "identity_extension",
    "apply_morphism",
    "affine_target",
    "canonical_affine_extension",
    "affine_split",
    "check_sigma_inner",
    "adjoint_coords",
    "presolve_linear",
    "template_equations",
    "cayley",
    "exp_nilpotent",
    "random_parabolic_element",
    "random_isotropy_automorphism",
]

PolyVec = List[PolyExpr]
ZERO = PolyExpr.const(0)


class ExtensionError(ValueError):
    """A violated extension axiom, with the basis indices that witness it."""

    def __init__(self, axiom: str, message: str, witness=None):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom}: {message}")


# ---------------------------------------------------------------------------
# small polynomial vector helpers


def _pv(vec: Sequence) -> PolyVec:
    return [PolyExpr.lift(x) for x in vec]


def _pv_zero(n: int) -> PolyVec:
    return [ZERO] * n


def _pv_add(u: Sequence[PolyExpr], v: Sequence[PolyExpr]) -> PolyVec:
    return [a + b for a, b in zip(u, v)]


def _pv_sub(u: Sequence[PolyExpr], v: Sequence[PolyExpr]) -> PolyVec:
    return [a - b for a, b in zip(u, v)]


def _pv_is_zero(u: Sequence[PolyExpr]) -> bool:
    return all(PolyExpr.lift(x).is_zero() for x in u)


def _combine(coeffs: Sequence, rows: Sequence[Sequence[PolyExpr]], width: int) -> PolyVec:
    """sum_k coeffs[k] * rows[k] for rational or polynomial coefficients."""
    out = _pv_zero(width)
    for c, row in zip(coeffs, rows):
        if isinstance(c, PolyExpr):
            if c.is_zero():
                continue
        elif not c:
            continue
        out = [a + c * b for a, b in zip(out, row)]
    return out


def _mat_apply(m: Mat, vec: Sequence[PolyExpr]) -> PolyVec:
    out = []
    for i in range(m.rows):
        acc = ZERO
        for j, x in enumerate(m.row(i)):
            if x and not vec[j].is_zero():
                acc = acc + vec[j] * x
        out.append(acc)
    return out


def adjoint_coords(alg: BasisAlgebra, g: Mat) -> Mat:
    """Coordinate matrix of X -> g X g^-1; columns are images of basis vectors."""
    inv = g.inverse()
    cols = []
    for b in alg.basis:
        c = alg.coords(g @ b @ inv, strict=False)
        if c is None:
            raise AlgebraError("conjugation does not preserve the algebra")
        cols.append(c)
    return Mat([[cols[j][i] for j in range(alg.dim)] for i in range(alg.dim)])


# ---------------------------------------------------------------------------
# the extension record


@dataclass(eq=False)
class Extension:
    source_alg: BasisAlgebra
    isotropy: Tuple[int, ...]
    frame: Tuple[int, ...]
    target: GradedAlgebra
    alpha: Tuple[Tuple[PolyExpr, ...], ...]
    h0: Optional[Mat] = None
    i_h0: Optional[Mat] = None
    fixed: Dict[str, Fraction] = field(default_factory=dict)
    solve_names: Tuple[str, ...] = ()
    product_names: Tuple[str, ...] = ()
    contact: bool = False
    label: str = ""
    pair: Optional[SymmetricPair] = None
    notes: Tuple[str, ...] = ()

    @classmethod
    def from_images(cls, source_alg: BasisAlgebra, isotropy, frame, target: GradedAlgebra, images, **kw) -> "Extension":
        """Build from target matrices (``PolyMat`` or ``Mat``), one per source basis vector."""
        if len(images) != source_alg.dim:
            raise ExtensionError("shape", "one image per source basis vector is required")
        rows = []
        for k, img in enumerate(images):
            pm = img if isinstance(img, PolyMat) else PolyMat.from_mat(img)
            coords, residual = target.alg.poly_coords_residual(pm)
            if residual:
                raise ExtensionError("alpha_in_target", f"image of {source_alg.names[k]} is not in the target algebra", k)
            rows.append(tuple(coords))
        return cls(source_alg, tuple(isotropy), tuple(frame), target, tuple(rows), **kw)

    @property
    def i_alg(self) -> Tuple[Tuple[PolyExpr, ...], ...]:
        return tuple(self.alpha[k] for k in self.isotropy)

    @property
    def dim_source(self) -> int:
        return self.source_alg.dim

    @property
    def dim_target(self) -> int:
        return self.target.dim

    def image_matrix(self, k: int) -> PolyMat:
        return self.target.alg.poly_element(self.alpha[k])

    def alpha_of(self, vec: Sequence) -> PolyVec:
        return _combine(vec, self.alpha, self.dim_target)

    def variables(self) -> set:
        out: set = set()
        for row in self.alpha:
            for x in row:
                out |= x.variables()
        return out

    def substitute(self, values: Mapping[str, object]) -> "Extension":
        """Substitute values for unknown parameters (numbers or polynomials)."""
        rows = tuple(tuple(x.subs(values) for x in row) for row in self.alpha)
        remaining = set()
        for row in rows:
            for x in row:
                remaining |= x.variables()
        names = tuple(n for n in self.solve_names if n in remaining)
        return replace(self, alpha=rows, solve_names=names)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""
    witness: Optional[Tuple] = None


@dataclass
class ValidationReport:
    checks: List[Check]
    info: Dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.ok]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _source_bracket(e: Extension, a: int, b: int) -> List[Fraction]:
    units = e.source_alg.unit_vectors()
    return e.source_alg.bracket(units[a], units[b])


def curvature_pair(e: Extension, u: Sequence, v: Sequence) -> PolyVec:
    """[alpha(u), alpha(v)] - alpha([u, v]) for source coordinate vectors."""
    au, av = e.alpha_of(u), e.alpha_of(v)
    br = e.target.alg.bracket(au, av)
    return _pv_sub(_pv(br), e.alpha_of(e.source_alg.bracket(list(u), list(v))))


def _basis_curvature(e: Extension, a: int, b: int) -> PolyVec:
    br = e.target.alg.bracket(list(e.alpha[a]), list(e.alpha[b]))
    return _pv_sub(_pv(br), e.alpha_of(_source_bracket(e, a, b)))


def minus_part_matrix(e: Extension) -> Mat:
    """Matrix of the induced map frame -> g_- (rows: g_- basis, cols: frame)."""
    minus = e.target.minus_indices
    rows = []
    for i in minus:
        row = []
        for a in e.frame:
            x = e.alpha[a][i]
            if not x.is_constant():
                raise ExtensionError(
                    "induces_isomorphism", "negative part of alpha depends on unsolved parameters", (a, i)
                )
            row.append(x.constant_value())
        rows.append(row)
    return Mat(rows) if rows else Mat.zeros(0)


def validate(e: Extension, values: Optional[Mapping[str, object]] = None) -> ValidationReport:
    """Check the extension axioms exactly (symbolically in any unknowns left)."""
    if values:
        e = e.substitute(values)
    checks: List[Check] = []
    g = e.target
    n = e.dim_source

    # alpha on h lands in p and is a homomorphism there
    bad = None
    for a in e.isotropy:
        if not all(e.alpha[a][i].is_zero() for i in g.minus_indices):
            bad = (a,)
            break
    if bad is None:
        for x, a in enumerate(e.isotropy):
            for b in e.isotropy[x + 1:]:
                if not _pv_is_zero(_basis_curvature(e, a, b)):
                    bad = (a, b)
                    break
            if bad:
                break
    checks.append(Check("extends_i", bad is None, "alpha restricted to h is a homomorphism into p", bad))

    # induced isomorphism k/h -> g/p
    try:
        m = minus_part_matrix(e)
        ok = m.rows == len(e.frame) and m.rows == m.cols and m.rank() == m.rows
        detail = "negative part of alpha on the frame is invertible"
        wit = None if ok else tuple(e.frame)
    except ExtensionError as exc:
        ok, detail, wit = False, str(exc), exc.witness
    checks.append(Check("induces_isomorphism", ok, detail, wit))

    # equivariance under h
    bad = None
    for a in e.isotropy:
        for b in range(n):
            if not _pv_is_zero(_basis_curvature(e, a, b)):
                bad = (a, b)
                break
        if bad:
            break
    checks.append(Check("equivariance_isotropy", bad is None, "alpha o ad(X) = ad(i(X)) o alpha for X in h", bad))

    # equivariance under the symmetry element
    if e.h0 is not None and e.i_h0 is not None:
        ad_src = adjoint_coords(e.source_alg, e.h0)
        ad_tgt = adjoint_coords(g.alg, e.i_h0)
        bad = None
        for k in range(n):
            lhs = _mat_apply(ad_tgt, e.alpha[k])
            rhs = e.alpha_of([ad_src[i, k] for i in range(n)])
            if not _pv_is_zero(_pv_sub(lhs, rhs)):
                bad = (k,)
                break
        checks.append(Check("equivariance_symmetry", bad is None, "Ad(i(h0)) o alpha = alpha o Ad(h0)", bad))
        sq = e.i_h0 @ e.i_h0
        involutive = sq == Mat.identity(sq.rows) or sq == -Mat.identity(sq.rows)
        checks.append(Check("symmetry_involutive", involutive, "i(h0)^2 acts trivially", None))
    report = ValidationReport(checks)
    if e.i_h0 is not None:
        report.info["sigma_inner"] = check_sigma_inner(e)
    return report


def require_valid(e: Extension, values=None) -> None:
    report = validate(e, values)
    if not report.ok:
        first = report.failures()[0]
        raise ExtensionError(first.name, first.detail, first.witness)


def check_sigma_inner(e: Extension) -> bool:
    """Whether Ad(i(h0)) equals the grading involution of the target."""
    if e.i_h0 is None:
        return False
    try:
        ad = adjoint_coords(e.target.alg, e.i_h0)
    except AlgebraError:
        return False
    return ad == sigma_involution(e.target)


# ---------------------------------------------------------------------------
# curvature


@dataclass
class Curv2:
    """Antisymmetric table of curvature values on frame positions."""

    frame: Tuple[int, ...]
    values: Dict[Tuple[int, int], PolyVec]
    width: int

    def __call__(self, a: int, b: int) -> PolyVec:
        if a == b:
            return _pv_zero(self.width)
        if a < b:
            return self.values[(a, b)]
        return [-x for x in self.values[(b, a)]]

    def is_zero(self) -> bool:
        return all(_pv_is_zero(v) for v in self.values.values())

    def substitute(self, values: Mapping[str, object]) -> "Curv2":
        return Curv2(self.frame, {k: [x.subs(values) for x in v] for k, v in self.values.items()}, self.width)

    def nonzero_entries(self) -> List[Tuple[int, int, int, PolyExpr]]:
        out = []
        for (a, b), v in sorted(self.values.items()):
            for i, x in enumerate(v):
                if not x.is_zero():
                    out.append((a, b, i, x))
        return out


def curvature(e: Extension) -> Curv2:
    """kappa(X, Y) = [alpha X, alpha Y] - alpha [X, Y] on frame pairs."""
    vals = {}
    f = e.frame
    for a in range(len(f)):
        for b in range(a + 1, len(f)):
            vals[(a, b)] = _basis_curvature(e, f[a], f[b])
    return Curv2(tuple(f), vals, e.dim_target)


@dataclass
class Cochain2:
    """Antisymmetric 2-cochain on the g_- basis of a graded algebra."""

    minus: Tuple[int, ...]
    values: Dict[Tuple[int, int], PolyVec]
    width: int

    def __call__(self, i: int, j: int) -> PolyVec:
        if i == j:
            return _pv_zero(self.width)
        if i < j:
            return self.values[(i, j)]
        return [-x for x in self.values[(j, i)]]

    def is_zero(self) -> bool:
        return all(_pv_is_zero(v) for v in self.values.values())

    def substitute(self, values: Mapping[str, object]) -> "Cochain2":
        return Cochain2(self.minus, {k: [x.subs(values) for x in v] for k, v in self.values.items()}, self.width)

    def __add__(self, other: "Cochain2") -> "Cochain2":
        return Cochain2(self.minus, {k: _pv_add(v, other.values[k]) for k, v in self.values.items()}, self.width)


def transport_to_gp(c: Curv2, e: Extension) -> Cochain2:
    """kappa(alpha_bar^-1 xi, alpha_bar^-1 eta) on the g_- basis of the target."""
    m = minus_part_matrix(e)
    if m.rows != m.cols or m.rank() != m.rows:
        raise ExtensionError("induces_isomorphism", "induced map k/h -> g/p is singular")
    inv = m.inverse()  # rows: frame positions, cols: g_- positions
    size = m.rows
    vals = {}
    for i in range(size):
        for j in range(i + 1, size):
            acc = _pv_zero(c.width)
            for a in range(size):
                x = inv[a, i]
                if not x:
                    continue
                for b in range(size):
                    y = inv[b, j]
                    if y and a != b:
                        acc = [s + t * (x * y) for s, t in zip(acc, c(a, b))]
            vals[(i, j)] = acc
    return Cochain2(tuple(e.target.minus_indices), vals, c.width)


def _values_or_zero(x: PolyExpr) -> bool:
    return not x.is_zero()


def is_flat(e: Extension, values=None) -> bool:
    if values:
        e = e.substitute(values)
    return curvature(e).is_zero()


def is_torsion_free(e: Extension, values=None) -> bool:
    if values:
        e = e.substitute(values)
    g = e.target
    minus = set(g.minus_indices)
    return all(v[i].is_zero() for v in curvature(e).values.values() for i in minus)


def is_regular(e: Extension, values=None) -> bool:
    if values:
        e = e.substitute(values)
    g = e.target
    kg = transport_to_gp(curvature(e), e)
    degs = [g.degree[i] for i in kg.minus]
    for (i, j), v in kg.values.items():
        bound = degs[i] + degs[j] + 1
        for k, x in enumerate(v):
            if not x.is_zero() and g.degree[k] < bound:
                return False
    return True


# ---------------------------------------------------------------------------
# composition and identity


def identity_extension(g: GradedAlgebra) -> Extension:
    """The graded algebra extended to itself; isotropy is the parabolic part."""
    n = g.dim
    rows = tuple(tuple(PolyExpr.const(int(i == j)) for j in range(n)) for i in range(n))
    g0 = g.sigma_element()
    return Extension(
        g.alg, tuple(g.p_indices), tuple(g.minus_indices), g, rows, h0=g0, i_h0=g0, contact=g.k == 2, label="identity"
    )


def compose(e1: Extension, e2: Extension) -> Extension:
    """Extension of e1's source obtained by following e1 with e2."""
    if e1.target.alg.basis != e2.source_alg.basis:
        raise ExtensionError("compose", "target of the first extension is not the source of the second")
    if e1.i_h0 is not None and e2.h0 is not None:
        if adjoint_coords(e2.source_alg, e1.i_h0) != adjoint_coords(e2.source_alg, e2.h0):
            raise ExtensionError("compose", "symmetry images do not match")
    width = e2.dim_target
    rows = tuple(tuple(_combine(row, e2.alpha, width)) for row in e1.alpha)
    names = tuple(dict.fromkeys(e1.solve_names + e2.solve_names))
    fixed = dict(e1.fixed)
    fixed.update(e2.fixed)
    return Extension(
        e1.source_alg,
        e1.isotropy,
        e1.frame,
        e2.target,
        rows,
        h0=e1.h0,
        i_h0=e2.i_h0,
        fixed=fixed,
        solve_names=names,
        product_names=tuple(dict.fromkeys(e1.product_names + e2.product_names)),
        contact=e1.contact,
        label=f"{e1.label}*{e2.label}",
        pair=e1.pair,
    )


# ---------------------------------------------------------------------------
# equivalence morphisms


def cayley(a: Mat) -> Mat:
    """(I - A)^-1 (I + A); stays inside any quadratic matrix group."""
    ident = Mat.identity(a.rows)
    return (ident - a).inverse() @ (ident + a)


def exp_nilpotent(n: Mat) -> Mat:
    """Exponential of a nilpotent matrix (finite series)."""
    size = n.rows
    out = Mat.identity(size)
    term = Mat.identity(size)
    for k in range(1, size + 1):
        term = (term @ n).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term
    if not term.is_zero():
        raise ValueError("matrix is not nilpotent")
    return out


def _random_rational(rng: random.Random, span: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, 3))


def random_parabolic_element(g: GradedAlgebra, rng: random.Random, scale: int = 2) -> Mat:
    """Cayley(A0) exp(N) with A0 in g_0 and N in p_+, rational entries."""
    alg = g.alg
    while True:
        a0 = [Fraction(0)] * g.dim
        for i in g.indices(0):
            a0[i] = _random_rational(rng, scale) / 4
        nn = [Fraction(0)] * g.dim
        for i, d in enumerate(g.degree):
            if d > 0:
                nn[i] = _random_rational(rng, scale)
        try:
            c = cayley(alg.element(a0))
        except ZeroDivisionError:
            continue
        if c.rank() != c.rows:
            continue
        return c @ exp_nilpotent(alg.element(nn))


def random_isotropy_automorphism(e: Extension, rng: random.Random) -> Tuple[Mat, Mat]:
    """(s, Ad(s)) for s = Cayley of a random isotropy element of the source."""
    src = e.source_alg
    while True:
        x = [Fraction(0)] * src.dim
        for k in e.isotropy:
            x[k] = _random_rational(rng) / 2
        try:
            s = cayley(src.element(x))
        except ZeroDivisionError:
            continue
        if s.rank() != s.rows:
            continue
        return s, adjoint_coords(src, s)


def _is_automorphism(alg: BasisAlgebra, sigma: Mat) -> bool:
    if sigma.rank() != alg.dim:
        return False
    units = alg.unit_vectors()
    cols = [[sigma[i, k] for i in range(alg.dim)] for k in range(alg.dim)]
    for a in range(alg.dim):
        for b in range(a + 1, alg.dim):
            lhs = sigma.apply(alg.bracket(units[a], units[b]))
            rhs = alg.bracket(cols[a], cols[b])
            if lhs != rhs:
                return False
    return True


def filtration_preserving(g: GradedAlgebra, p0: Mat) -> bool:
    try:
        ad = adjoint_coords(g.alg, p0)
    except (AlgebraError, ZeroDivisionError):
        return False
    for j in range(g.dim):
        for i in range(g.dim):
            if ad[i, j] and g.degree[i] < g.degree[j]:
                return False
    return True


def apply_morphism(
    e: Extension,
    p0: Optional[Mat] = None,
    sigma: Optional[Mat] = None,
    sigma_element: Optional[Mat] = None,
) -> Extension:
    """alpha_hat = Ad(p0^-1) o alpha o sigma and i_hat(h) = p0^-1 i(h) p0.

    ``sigma`` is a coordinate automorphism of the source; alternatively
    ``sigma_element`` is a source group element and sigma = Ad(sigma_element).
    """
    g = e.target
    size = g.alg.size
    p0 = Mat.identity(size) if p0 is None else p0
    if p0.rank() != size or not filtration_preserving(g, p0):
        raise ExtensionError("morphism", "p0 does not preserve the filtration of the target")
    notes = list(e.notes)
    if sigma_element is not None:
        sigma = adjoint_coords(e.source_alg, sigma_element)
        notes.append("sigma inner")
    elif sigma is not None:
        notes.append("sigma given on coordinates; innerness not verified")
    n = e.dim_source
    if sigma is None:
        sigma = Mat.identity(n)
    if not _is_automorphism(e.source_alg, sigma):
        raise ExtensionError("morphism", "sigma is not a Lie algebra automorphism of the source")
    iso = set(e.isotropy)
    for k in e.isotropy:
        if any(sigma[i, k] for i in range(n) if i not in iso):
            raise ExtensionError("morphism", "sigma does not preserve the isotropy algebra", (k,))
    if e.h0 is not None:
        ad_h = adjoint_coords(e.source_alg, e.h0)
        if ad_h @ sigma != sigma @ ad_h:
            raise ExtensionError("morphism", "sigma does not commute with the symmetry")
    inv = p0.inverse()
    ad_inv = adjoint_coords(g.alg, inv)
    rows = []
    for k in range(n):
        img = e.alpha_of([sigma[i, k] for i in range(n)])
        rows.append(tuple(_mat_apply(ad_inv, img)))
    i_h0 = inv @ e.i_h0 @ p0 if e.i_h0 is not None else None
    return replace(e, alpha=tuple(rows), i_h0=i_h0, notes=tuple(notes), label=e.label + "'")


# ---------------------------------------------------------------------------
# affine targets


def affine_target(n: int) -> GradedAlgebra:
    """Matrices [[0, 0], [v, A]]: translations v in degree -1, gl(n) in degree 0."""
    size = n + 1
    basis, degs = [], []
    for i in range(n):
        basis.append(Mat.unit(size, i + 1, 0))
        degs.append(-1)
    for i in range(n):
        for j in range(n):
            basis.append(Mat.unit(size, i + 1, j + 1))
            degs.append(0)
    alg = BasisAlgebra(basis)
    return GradedAlgebra(alg, 1, degs, (1, n), "affine", {"n": n})


def canonical_affine_extension(pair: SymmetricPair) -> Extension:
    """alpha(h + X) = (X, ad(h) restricted to m) in the m basis."""
    alg = pair.alg
    units = alg.unit_vectors()
    m_idx = pair.frame_indices(contact=False)
    iso = [i for i in range(alg.dim) if i not in m_idx]
    n = len(m_idx)
    target = affine_target(n)
    pos = {k: p for p, k in enumerate(m_idx)}
    images = []
    for k in range(alg.dim):
        mat = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
        if k in pos:
            mat[pos[k] + 1][0] = Fraction(1)
        else:
            for col, j in enumerate(m_idx):
                br = alg.bracket(units[k], units[j])
                for row, i in enumerate(m_idx):
                    mat[row + 1][col + 1] = br[i]
                if any(br[i] for i in iso):
                    raise ExtensionError("equivariance_isotropy", "[h, m] is not contained in m")
        images.append(Mat(mat))
    g0 = Mat.diag([1] + [-1] * n)
    return Extension.from_images(
        alg, iso, m_idx, target, images, h0=pair.h0, i_h0=g0, label="affine", pair=pair
    )


def affine_split(c: Curv2, e: Extension) -> Tuple[Curv2, Curv2]:
    """(torsion, curvature) parts: translation and linear components of kappa."""
    g = e.target
    if g.family != "affine":
        raise ExtensionError("affine_split", "target is not an affine algebra")
    trans = set(g.indices(-1))
    tors = {k: [x if i in trans else ZERO for i, x in enumerate(v)] for k, v in c.values.items()}
    curv = {k: [ZERO if i in trans else x for i, x in enumerate(v)] for k, v in c.values.items()}
    return Curv2(c.frame, tors, c.width), Curv2(c.frame, curv, c.width)


# ---------------------------------------------------------------------------
# solving linear side conditions on template unknowns


def template_equations(
    source_alg: BasisAlgebra,
    isotropy: Sequence[int],
    target: GradedAlgebra,
    images: Sequence[PolyMat],
    h0: Optional[Mat],
    i_h0: Optional[Mat],
) -> List[PolyExpr]:
    """Membership and equivariance residuals of a symbolic template."""
    eqs: List[PolyExpr] = []
    rows = []
    for img in images:
        coords, residual = target.alg.poly_coords_residual(img)
        eqs.extend(residual)
        rows.append(coords)
    units = source_alg.unit_vectors()
    width = target.dim
    for a in isotropy:
        for b in range(source_alg.dim):
            br = target.alg.bracket(rows[a], rows[b])
            rhs = _combine(source_alg.bracket(units[a], units[b]), rows, width)
            eqs.extend(x for x in _pv_sub(_pv(br), rhs) if not x.is_zero())
    if h0 is not None and i_h0 is not None:
        ad_src = adjoint_coords(source_alg, h0)
        ad_tgt = adjoint_coords(target.alg, i_h0)
        for k in range(source_alg.dim):
            lhs = _mat_apply(ad_tgt, rows[k])
            rhs = _combine([ad_src[i, k] for i in range(source_alg.dim)], rows, width)
            eqs.extend(x for x in _pv_sub(lhs, rhs) if not x.is_zero())
    return eqs


def presolve_linear(eqs: Sequence[PolyExpr], unknowns: Sequence[str]) -> Tuple[Dict[str, PolyExpr], List[str]]:
    """Solve affine equations in ``unknowns``; later unknowns are kept free.

    Returns (assignments, free unknowns).  Equations must be affine in the
    unknowns with rational coefficients.
    """
    unknowns = list(unknowns)
    index = {u: i for i, u in enumerate(unknowns)}
    rows = []
    for eq in eqs:
        lin = eq.linear_part(unknowns)
        if lin is None:
            raise ExtensionError("template", f"side condition is not affine in the template unknowns: {eq}")
        coeffs, const = lin
        row = [Fraction(0)] * (len(unknowns) + 1)
        for name, c in coeffs.items():
            row[index[name]] = c
        row[-1] = -const
        if any(row):
            rows.append(row)
    if not rows:
        return {}, unknowns
    red, piv = rref(rows)
    if len(unknowns) in piv:
        raise ExtensionError("template", "side conditions are inconsistent")
    free = [u for i, u in enumerate(unknowns) if i not in piv]
    assign = {}
    for r, p in zip(red, piv):
        expr = PolyExpr.const(r[-1])
        for i, u in enumerate(unknowns):
            if i != p and r[i]:
                expr = expr - PolyExpr.var(u) * r[i]
        assign[unknowns[p]] = expr
    return assign, free
