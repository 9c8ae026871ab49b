"""Matrix Lie algebras given by an explicit rational basis."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exactmath import Mat, PolyExpr, PolyMat, mat_commutator, nullspace, rank, rref, to_rational

__all__ = [
    "AlgebraError",
    "NotClosedError",
    "BasisAlgebra",
    "build_from_basis",
    "centralizer_fixed_space",
    "is_subalgebra",
    "linear_matrix_algebra",
    "span_rref",
    "derived_span",
    "largest_ideal_in",
]

Vec = List[Fraction]


class AlgebraError(ValueError):
    pass


class NotClosedError(AlgebraError):
    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"bracket of basis elements {i} and {j} leaves the span")


def _sparse(m: Mat) -> List[Tuple[int, Fraction]]:
    return [(k, x) for k, x in enumerate(m.flat()) if x]


class BasisAlgebra:
    """Span of rational matrices closed under the commutator.

    Elements are handled through coordinate vectors with respect to ``basis``.
    The Killing form is computed from the structure constants.
    """

    def __init__(self, basis: Sequence[Mat], names: Optional[Sequence[str]] = None, check: bool = True):
        if not basis:
            raise AlgebraError("empty basis")
        self.size = basis[0].rows
        self.basis: Tuple[Mat, ...] = tuple(basis)
        self.dim = len(basis)
        self.names = tuple(names) if names else tuple(f"b{i}" for i in range(self.dim))
        self._sparse = [_sparse(b) for b in basis]
        rows = [list(b.flat()) for b in basis]
        if rank(rows) != self.dim:
            raise AlgebraError("basis matrices are linearly dependent")
        # coordinates are read off a set of pivot entries
        red, piv = rref(rows)
        self._pivots = piv
        square = Mat([[r[p] for p in piv] for r in rows])
        inv = square.inverse()
        self._coord_rows = [[(j, x) for j, x in enumerate(inv.row(p)) if x] for p in range(self.dim)]
        self.structure: List[List[Dict[int, Fraction]]] = [[{} for _ in range(self.dim)] for _ in range(self.dim)]
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                br = mat_commutator(basis[i], basis[j])
                c = self.coords(br, strict=False)
                if c is None:
                    raise NotClosedError(i, j)
                d = {k: x for k, x in enumerate(c) if x}
                self.structure[i][j] = d
                self.structure[j][i] = {k: -x for k, x in d.items()}
        self._killing: Optional[Mat] = None

    # -- coordinates -----------------------------------------------------
    def coords(self, m: Mat, strict: bool = True) -> Optional[Vec]:
        flat = m.flat()
        out = [Fraction(0)] * self.dim
        for p_idx, p in enumerate(self._pivots):
            v = flat[p]
            if v:
                for j, x in self._coord_rows[p_idx]:
                    out[j] += v * x
        # membership check
        recon = [Fraction(0)] * len(flat)
        for c, sp in zip(out, self._sparse):
            if c:
                for k, x in sp:
                    recon[k] += c * x
        if list(flat) != recon:
            if strict:
                raise AlgebraError("matrix is not in the algebra")
            return None
        return out

    def contains(self, m: Mat) -> bool:
        return self.coords(m, strict=False) is not None

    def poly_coords(self, m: PolyMat, strict: bool = True) -> Optional[List[PolyExpr]]:
        flat = m.flat()
        zero = PolyExpr.const(0)
        out = [zero] * self.dim
        for p_idx, p in enumerate(self._pivots):
            v = flat[p]
            if not v.is_zero():
                for j, x in self._coord_rows[p_idx]:
                    out[j] = out[j] + v * x
        recon = [zero] * len(flat)
        for c, sp in zip(out, self._sparse):
            if not c.is_zero():
                for k, x in sp:
                    recon[k] = recon[k] + c * x
        if any(a != b for a, b in zip(flat, recon)):
            if strict:
                raise AlgebraError("polynomial matrix is not in the algebra")
            return None
        return out

    def poly_coords_residual(self, m: PolyMat) -> Tuple[List[PolyExpr], List[PolyExpr]]:
        """Pivot-read coordinates and the nonzero entries of m - element(coords).

        The residual vanishes exactly when m lies in the algebra, so its
        entries are the membership equations for a symbolic matrix.
        """
        flat = m.flat()
        zero = PolyExpr.const(0)
        out = [zero] * self.dim
        for p_idx, p in enumerate(self._pivots):
            v = flat[p]
            if not v.is_zero():
                for j, x in self._coord_rows[p_idx]:
                    out[j] = out[j] + v * x
        recon = [zero] * len(flat)
        for c, sp in zip(out, self._sparse):
            if not c.is_zero():
                for k, x in sp:
                    recon[k] = recon[k] + c * x
        residual = [a - b for a, b in zip(flat, recon)]
        return out, [r for r in residual if not r.is_zero()]

    def element(self, coords: Sequence) -> Mat:
        n = self.size
        acc = [Fraction(0)] * (n * n)
        for c, sp in zip(coords, self._sparse):
            c = to_rational(c)
            if c:
                for k, x in sp:
                    acc[k] += c * x
        return Mat([acc[r * n:(r + 1) * n] for r in range(n)])

    def poly_element(self, coords: Sequence[PolyExpr]) -> PolyMat:
        n = self.size
        zero = PolyExpr.const(0)
        acc = [zero] * (n * n)
        for c, sp in zip(coords, self._sparse):
            c = PolyExpr.lift(c)
            if not c.is_zero():
                for k, x in sp:
                    acc[k] = acc[k] + c * x
        return PolyMat([acc[r * n:(r + 1) * n] for r in range(n)])

    # -- brackets and forms ----------------------------------------------
    def bracket(self, u: Sequence, v: Sequence) -> List:
        """Bracket of coordinate vectors; works for rational or polynomial entries."""
        poly = any(isinstance(x, PolyExpr) for x in u) or any(isinstance(x, PolyExpr) for x in v)
        zero = PolyExpr.const(0) if poly else Fraction(0)
        out = [zero] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b or i == j:
                    continue
                ab = a * b
                for k, x in self.structure[i][j].items():
                    out[k] = out[k] + ab * x
        return out

    def ad_matrix(self, u: Sequence) -> Mat:
        cols = [self.bracket(u, e) for e in self.unit_vectors()]
        return Mat([[cols[j][i] for j in range(self.dim)] for i in range(self.dim)])

    def unit_vectors(self) -> List[Vec]:
        return [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]

    @property
    def killing(self) -> Mat:
        if self._killing is None:
            n = self.dim
            out = [[Fraction(0)] * n for _ in range(n)]
            s = self.structure
            for i in range(n):
                for j in range(i, n):
                    t = Fraction(0)
                    for a, row in enumerate(s[i]):
                        for b, x in row.items():
                            y = s[j][b].get(a)
                            if y:
                                t += x * y
                    out[i][j] = out[j][i] = t
            self._killing = Mat(out)
        return self._killing

    def killing_form(self, u: Sequence, v: Sequence):
        k = self.killing
        total = 0
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b and k[i, j]:
                    total = total + a * b * k[i, j]
        return total

    def is_semisimple(self) -> bool:
        return self.killing.rank() == self.dim

    def jacobi_defect(self) -> List[Tuple[int, int, int]]:
        """Triples of basis indices where the Jacobi identity fails."""
        bad = []
        e = self.unit_vectors()
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                bij = self.bracket(e[i], e[j])
                for k in range(j + 1, self.dim):
                    t1 = self.bracket(bij, e[k])
                    t2 = self.bracket(self.bracket(e[j], e[k]), e[i])
                    t3 = self.bracket(self.bracket(e[k], e[i]), e[j])
                    if any(a + b + c for a, b, c in zip(t1, t2, t3)):
                        bad.append((i, j, k))
        return bad


def build_from_basis(basis: Sequence[Mat], names: Optional[Sequence[str]] = None) -> BasisAlgebra:
    """Structure constants and Killing form of the span of ``basis``.

    Raises :class:`NotClosedError` naming the first pair whose bracket leaves the span.
    """
    return BasisAlgebra(basis, names)


def span_rref(vectors: Sequence[Sequence]) -> List[Vec]:
    return rref([list(v) for v in vectors])[0] if vectors else []


def in_span(span: Sequence[Vec], v: Sequence) -> bool:
    if not any(v):
        return True
    return rank(list(span) + [list(v)]) == len(span_rref(span))


def is_subalgebra(alg: BasisAlgebra, span: Sequence[Sequence]) -> bool:
    """Whether the coordinate vectors in ``span`` span a subalgebra."""
    basis = span_rref(span)
    for i, u in enumerate(basis):
        for v in basis[i + 1:]:
            if not in_span(basis, alg.bracket(u, v)):
                return False
    return True


def derived_span(alg: BasisAlgebra, span: Sequence[Sequence]) -> List[Vec]:
    basis = span_rref(span)
    brs = []
    for i, u in enumerate(basis):
        for v in basis[i + 1:]:
            w = alg.bracket(u, v)
            if any(w):
                brs.append(w)
    return span_rref(brs)


def largest_ideal_in(alg: BasisAlgebra, span: Sequence[Sequence]) -> List[Vec]:
    """Largest ideal of the whole algebra contained in ``span``."""
    current = span_rref(span)
    e = alg.unit_vectors()
    while current:
        # keep x with [b_i, x] in current for all i
        n = len(current)
        eqs_cols: List[List[Fraction]] = []
        complement = _annihilator(current, alg.dim)
        for bi in e:
            imgs = [alg.bracket(bi, x) for x in current]
            for f in complement:
                eqs_cols.append([sum((a * b for a, b in zip(f, img)), Fraction(0)) for img in imgs])
        sols = nullspace(eqs_cols, n) if eqs_cols else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        new = span_rref([[sum((c * x[k] for c, x in zip(s, current)), Fraction(0)) for k in range(alg.dim)] for s in sols])
        if len(new) == len(current):
            return new
        current = new
    return []


def _annihilator(span: Sequence[Vec], dim: int) -> List[Vec]:
    """Linear functionals vanishing on ``span``."""
    if not span:
        return [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    return nullspace([list(v) for v in span], dim)


def centralizer_fixed_space(alg: BasisAlgebra, h0: Mat) -> Tuple[List[Vec], List[Vec]]:
    """(+1, -1) eigenspaces of Ad(h0) on the algebra, as coordinate bases."""
    inv = h0.inverse()
    cols = []
    for b in alg.basis:
        c = alg.coords(h0 @ b @ inv, strict=False)
        if c is None:
            raise AlgebraError("h0 does not normalise the algebra")
        cols.append(c)
    ad = Mat([[cols[j][i] for j in range(alg.dim)] for i in range(alg.dim)])
    ident = Mat.identity(alg.dim)
    plus = nullspace((ad - ident).tolist(), alg.dim)
    minus = nullspace((ad + ident).tolist(), alg.dim)
    return span_rref(plus), span_rref(minus)


def linear_matrix_algebra(
    size: int,
    conditions: Callable[[Mat], Sequence[Mat]],
    degree_of_entry: Optional[Callable[[int, int], int]] = None,
) -> Tuple[List[Mat], List[int]]:
    """Basis of {M : conditions(M) all vanish}, split by entry degree.

    ``conditions`` must be linear in M.  With ``degree_of_entry`` each basis
    element is supported on entries of a single degree, provided the
    conditions respect that degree.  Returns (basis, degrees), sorted by degree.
    """
    deg = degree_of_entry or (lambda r, c: 0)
    by_degree: Dict[int, List[Tuple[int, int]]] = {}
    for r in range(size):
        for c in range(size):
            by_degree.setdefault(deg(r, c), []).append((r, c))
    basis: List[Mat] = []
    degrees: List[int] = []
    for d in sorted(by_degree):
        entries = by_degree[d]
        images = []
        for r, c in entries:
            imgs = conditions(Mat.unit(size, r, c))
            images.append([x for m in imgs for x in m.flat()])
        neq = len(images[0]) if images else 0
        system = [[images[v][e] for v in range(len(entries))] for e in range(neq)]
        system = [row for row in system if any(row)]
        sols = nullspace(system, len(entries)) if system else [
            [Fraction(int(i == j)) for j in range(len(entries))] for i in range(len(entries))
        ]
        for s in sols:
            m = [[Fraction(0)] * size for _ in range(size)]
            for (r, c), x in zip(entries, s):
                m[r][c] = x
            basis.append(Mat(m))
            degrees.append(d)
    # the degree split is only valid if the conditions respect it
    full = []
    for r in range(size):
        for c in range(size):
            full.append([x for m in conditions(Mat.unit(size, r, c)) for x in m.flat()])
    system = [list(col) for col in zip(*full)]
    total = size * size - rank([row for row in system if any(row)])
    if total != len(basis):
        raise AlgebraError("defining conditions do not respect the entry degrees")
    return basis, degrees
